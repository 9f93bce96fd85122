import datetime

from .models import Model
from .views import CLIView
from .packages import utils


class Controller:
    """ Connects a run model to a view

    Parameters
    ----------
    command: str
        train, eval or compare
    config_path: str
        Settings file merged over the defaults
    overrides: dict
        Settings entries that win over every file
    view: View
        Where output goes, a CLIView when not given

    Methods
    -------
    run
        Run the command and hand its result to the view
    output_to_console
        Relay a model message to the view, stamped with the wall time
    update_progress
        Relay the model progress to the view
    """
    def __init__(self, command: str, config_path: str = None,
                 overrides: dict = None, view=None) -> None:
        self._view = CLIView() if view is None else view
        self._model = Model()
        self._view.connect_controller(self)
        self._model.connect_controller(self)

        self._model.command = command
        self._model.import_settings(config_path, overrides)
        utils.set_seed(self._model.config.seed)
        self._view.start()

    def run(self):
        command = self._model.command
        self.output_to_console(f'Started {command} with seed '
                               f'{utils.get_seed()}')
        result = self._model.run()
        self._view.update_progress(100)
        self._view.show_result(command, result)
        return(result)

    # Called by the model
    def output_to_console(self, text: str) -> None:
        stamp = datetime.datetime.now().strftime("%H:%M:%S")
        self._view.output_to_console(f"[{stamp}]: {text}")

    def update_progress(self, percent_done: float) -> None:
        self._view.update_progress(min(percent_done, 100))
