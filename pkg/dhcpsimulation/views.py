class View:
    """ Front end of a run

    Shows what the controller relays from the model. Subclasses decide
    where it goes.

    Methods
    -------
    connect_controller
        Link a controller to the current view
    banner
        Name and license text shown when a run starts

    Overridden Methods
    ------------------
    start
        Announce the run
    update_progress
        Show how much of the command has finished
    output_to_console
        Show a message
    show_result
        Show what a command returned
    """
    def connect_controller(self, controller) -> None:
        self._controller = controller

    @staticmethod
    def banner() -> str:
        return("DHCP Traffic Signal Simulation\n"
               "Released under the MIT license")

    def start(self) -> None:
        raise NotImplementedError(f"{type(self).__name__} cannot start a run")

    def update_progress(self, percent_done: float) -> None:
        raise NotImplementedError(f"{type(self).__name__} has no progress bar")

    def output_to_console(self, text: str) -> None:
        raise NotImplementedError(f"{type(self).__name__} has no console")

    def show_result(self, command: str, result) -> None:
        raise NotImplementedError(f"{type(self).__name__} cannot show results")


class CLIView(View):
    """ Prints to the terminal, nothing is printed when quiet """
    bar_length = 40

    def __init__(self, quiet: bool = False) -> None:
        self.quiet = quiet
        self._last_percent = None

    def start(self) -> None:
        if not self.quiet:
            print(self.banner())

    def update_progress(self, percent_done: float) -> None:
        percent_done = round(percent_done, 1)
        if self.quiet or percent_done == self._last_percent:
            return
        self._last_percent = percent_done
        filled = int(percent_done * self.bar_length // 100)
        bar = '#' * filled + '.' * (self.bar_length - filled)
        print(f'\r[{bar}] {percent_done:5.1f}%', end='')
        if percent_done >= 100:
            print()

    def output_to_console(self, text: str) -> None:
        if not self.quiet:
            print(text)

    def show_result(self, command: str, result) -> None:
        if self.quiet or result is None:
            return
        if command == "compare":
            width = max(len(row.controller) for row in result)
            for row in result:
                print(f"{row.controller:<{width}}  "
                      f"{row.mean_travel_time:8.2f} +/- "
                      f"{row.std_travel_time:.2f} s "
                      f"({len(row.travel_times)} seeds)")
        elif command == "eval":
            print(f"{result.controller}: average travel time "
                  f"{result.avg_travel_time:.2f} s, {result.throughput} "
                  f"finished, reward {result.episode_reward:.2f}")
        elif len(result):
            last = result.rows[-1]
            print(f"episode {last.episode}: reward "
                  f"{last.mean_episode_reward:.3f}, travel time "
                  f"{last.avg_travel_time:.2f} s, rho_ns "
                  f"{last.mean_rho_ns:.2f}")
