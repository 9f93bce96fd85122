import os

from .packages import experiments
from .packages.config import RunConfig, load_config

COMMANDS = ("train", "eval", "compare")


class Model:
    """ Runs one command of the toolkit against a resolved configuration

    Messages from the experiment code are collected in a console buffer and
    flushed to the controller, progress is forwarded as a percentage.

    Attributes
    ----------
    is_running: bool
        True while a command executes
    command: str
        train, eval or compare
    config: RunConfig
        Resolved settings of the run
    result
        TrainingLog, EpisodeResult or list of ComparisonRow, None before
        the first run

    Methods
    -------
    connect_controller
        Attach the controller that receives messages and progress
    import_settings
        Resolve the configuration from the settings files and overrides
    append_console_buffer
        Queue a message
    output_console_buffer
        Send queued messages to the controller
    run
        Execute the command
    """
    def __init__(self) -> None:
        self._console_buffer = []
        self._config = None
        self.is_running = False
        self.result = None

    def command() -> dict:
        doc = """One of train, eval or compare"""

        def fget(self) -> str:
            return(self._command)

        def fset(self, value: str) -> None:
            if not isinstance(value, str):
                raise TypeError(f"Command must be a string, "
                                f"got a {type(value)}")
            if value not in COMMANDS:
                raise ValueError(f"Unknown command {value}, expected one of "
                                 f"{COMMANDS}")
            self._command = value

        return({'fget': fget, 'fset': fset, 'doc': doc})
    command = property(**command())

    def config() -> dict:
        doc = """Validated run configuration"""

        def fget(self) -> RunConfig:
            if self._config is None:
                raise RuntimeError("Settings have not been imported yet")
            return(self._config)

        def fset(self, value: RunConfig) -> None:
            if not isinstance(value, RunConfig):
                raise TypeError(f"Expected a RunConfig, got a {type(value)}")
            value.validate()
            self._config = value

        return({'fget': fget, 'fset': fset, 'doc': doc})
    config = property(**config())

    def connect_controller(self, controller) -> None:
        self._controller = controller

    def import_settings(self, path: str = None,
                        overrides: dict = None) -> None:
        """ Merge path over settings/run.yaml, then apply overrides """
        if path is not None and not os.path.isfile(path):
            raise RuntimeError(f"Settings file '{path}' not found")
        self.config = load_config(path, overrides)

    def append_console_buffer(self, text: str) -> None:
        self._console_buffer.append(text)

    def output_console_buffer(self) -> None:
        if self._console_buffer:
            self._controller.output_to_console(
                "\n".join(self._console_buffer))
            self._console_buffer = []

    def _console(self, text: str) -> None:
        self.append_console_buffer(text)
        self.output_console_buffer()

    def _progress(self, fraction: float) -> None:
        self._controller.update_progress(fraction * 100)

    def run(self):
        config = self.config
        self.is_running = True
        try:
            if self.command == "train":
                self.result = experiments.run_train(config, self._console,
                                                    self._progress)
                self.append_console_buffer(
                    f"Agents of {len(self.result)} episodes saved in "
                    f"{config.output}")
            elif self.command == "eval":
                self.result = experiments.run_eval(
                    config, console=self._console, progress=self._progress)
            else:
                self.result = experiments.run_compare(
                    experiments.compare_configs(config), config.seeds,
                    config.workers, config.output, self._console)
                self.append_console_buffer(
                    f"Comparison written to {config.output}")
        finally:
            self.is_running = False
        self.output_console_buffer()
        return(self.result)
