""" DHCP Traffic Signal Simulation

Main file used to train, evaluate and compare signal controllers

Usage: python -m dhcpsimulation.main {train,eval,compare} [options]

Takes the following arguments:
    -h   --help         Display help information

    -c   --config       Settings file merged over settings/run.yaml
    -S   --scenario     Directory holding roadnet.json and flow.json
    -k   --controller   fixed, sotl, maxpressure or dhcp
    -e   --episodes     Training episodes
    -s   --seed         Seed to use for random number generation
    -o   --out          Run directory
         --seeds        Seeds of a comparison
         --workers      Processes used by a comparison
         --checkpoint   Directory of agents to start from
         --resume       Continue the training run in --out
    -q   --quiet        Only write files
"""
import argparse
import os

from .controllers import Controller
from .views import CLIView


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dhcpsimulation")
    parser.add_argument('command',
                        help='what to run',
                        choices=['train', 'eval', 'compare'])
    parser.add_argument('-c', '--config',
                        help='settings file merged over the defaults',
                        type=str,
                        default=None)
    parser.add_argument('-S', '--scenario',
                        help='directory holding roadnet.json and flow.json',
                        type=str,
                        default=None)
    parser.add_argument('-k', '--controller',
                        help='controller to run',
                        choices=['fixed', 'sotl', 'maxpressure', 'dhcp'],
                        default=None)
    parser.add_argument('-e', '--episodes',
                        help='number of training episodes',
                        type=int,
                        default=None)
    parser.add_argument('-s', '--seed',
                        help='the seed to use for the run',
                        type=int,
                        default=None)
    parser.add_argument('-o', '--out',
                        help='run directory',
                        type=str,
                        default=None)
    parser.add_argument('--seeds',
                        help='seeds of a comparison',
                        type=int,
                        nargs='+',
                        default=None)
    parser.add_argument('--workers',
                        help='processes used by a comparison',
                        type=int,
                        default=None)
    parser.add_argument('--checkpoint',
                        help='directory of agents to start from',
                        type=str,
                        default=None)
    parser.add_argument('--resume',
                        help='continue the training run in --out',
                        action='store_true')
    parser.add_argument('-q', '--quiet',
                        help='do not print progress',
                        action='store_true')
    return(parser)


def overrides_from_args(args: argparse.Namespace) -> dict:
    """ Settings entries set on the command line """
    overrides = {}
    flags = {'controller': args.controller, 'episodes': args.episodes,
             'seed': args.seed, 'output': args.out, 'seeds': args.seeds,
             'workers': args.workers, 'checkpoint': args.checkpoint}
    for key, value in flags.items():
        if value is not None:
            overrides[key] = value
    if args.resume:
        overrides['resume'] = True
    if args.scenario is not None:
        overrides['scenario'] = {
            'roadnet': os.path.join(args.scenario, 'roadnet.json'),
            'flow': os.path.join(args.scenario, 'flow.json')}
    return(overrides)


def main(argv: list = None):
    args = build_parser().parse_args(argv)
    controller = Controller(args.command,
                            config_path=args.config,
                            overrides=overrides_from_args(args),
                            view=CLIView(quiet=args.quiet))
    return(controller.run())


if __name__ == '__main__':
    main()
