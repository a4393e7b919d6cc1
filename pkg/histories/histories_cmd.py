"""
Created on 2026-10-09

@author: wf
"""
import json
import logging
import sys
import traceback
from argparse import ArgumentParser, Namespace, RawDescriptionHelpFormatter
from typing import List, Optional

from lodstorage.lod_csv import CSV
from ngwidgets.progress import TqdmProgressbar

from histories.config import Settings, build_space, dump_space, load_config, save_config
from histories.ergodic import (
    IdentityMap,
    Interval,
    Rotation,
    convergence_series,
    empirical_density,
    x0_sensitivity,
)
from histories.errors import HistoriesError, ResourceBudgetError
from histories.history import HistorySpace, decoherence_report, iter_histories
from histories.models import (
    BranchTree,
    FrequencyQuery,
    bernoulli_series,
    count_fraction,
    division_model,
    hilbert_bernoulli_model,
    hilbert_tree_model,
    measure_fraction,
    partial_decoherence_model,
    reference_query,
)
from histories.operators import Tolerance
from histories.probability import (
    absolute_measure,
    chance_of_present,
    compare_views,
    mixture_comparison,
    retrodictive_chances,
    segment_measure,
)
from histories.profiler import Profiler
from histories.version import Version


def float_list(value: str) -> List[float]:
    """
    parse a comma separated list of floats e.g. 0,0.1,0.5,1
    """
    return [float(part) for part in value.split(",") if part.strip()]


def int_list(value: str) -> List[int]:
    return [int(float(part)) for part in value.split(",") if part.strip()]


def window(value: str) -> FrequencyQuery:
    """
    parse a lo:hi relative frequency window
    """
    lo, sep, hi = value.partition(":")
    if not sep:
        raise ValueError(f"window {value} must have the form lo:hi")
    return FrequencyQuery(0, float(lo), float(hi))


class HistoriesArgumentParser(ArgumentParser):
    """
    argument parser that exits with code 1 on usage errors
    """

    def error(self, message: str):
        """
        report a usage error with exit code 1
        """
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class HistoriesCmd:
    """
    command line access to pyHistories
    """

    def __init__(self, version: Version = None):
        self.version = Version() if version is None else version
        self.program_name = "histories"
        self.exit_code = 0
        self.args: Optional[Namespace] = None
        self.parser: Optional[ArgumentParser] = None

    def getArgParser(self, description: str, version_msg: str) -> ArgumentParser:
        """
        Setup command line argument parser

        Args:
            description(str): the description
            version_msg(str): the version message

        Returns:
            ArgumentParser: the argument parser
        """
        parser = HistoriesArgumentParser(
            prog=self.program_name,
            description=description,
            formatter_class=RawDescriptionHelpFormatter,
        )
        parser.add_argument(
            "-a",
            "--about",
            action="store_true",
            help="show about info [default: %(default)s]",
        )
        parser.add_argument(
            "-d",
            "--debug",
            action="store_true",
            help="show debug info [default: %(default)s]",
        )
        parser.add_argument("-V", "--version", action="version", version=version_msg)
        parser.add_argument(
            "--format",
            choices=["csv", "json"],
            default="csv",
            help="output format [default: %(default)s]",
        )
        parser.add_argument("--tol", type=float, help="override both τ_alg and ε_dec")
        parser.add_argument(
            "--seed",
            type=int,
            default=0,
            help="recorded in the output header [default: %(default)s]",
        )
        parser.add_argument(
            "--settings",
            help="settings yaml file [default: ~/.histories/settings.yaml]",
        )
        parser.add_argument(
            "--progress", action="store_true", help="show progress bars on stderr"
        )
        subparsers = parser.add_subparsers(
            dest="command", parser_class=HistoriesArgumentParser
        )

        def add_model_args(subparser: ArgumentParser, delta_help: str):
            subparser.add_argument("-c", "--config", help="model config yaml file")
            subparser.add_argument(
                "--model",
                choices=["bernoulli", "partial-decoherence", "tree", "division"],
                default="bernoulli",
                help="named model builder [default: %(default)s]",
            )
            subparser.add_argument(
                "--N",
                type=int,
                default=3,
                help="number of trials [default: %(default)s]",
            )
            subparser.add_argument(
                "--p",
                type=float,
                default=0.5,
                help="weight of outcome 0 [default: %(default)s]",
            )
            subparser.add_argument(
                "--weights",
                type=float_list,
                help="outcome weights per level of a tree model",
            )
            subparser.add_argument(
                "--present",
                type=int,
                default=0,
                help="the trial that is the present [default: %(default)s]",
            )
            subparser.add_argument(
                "--delta", type=float_list, default=[0.0], help=delta_help
            )
            subparser.add_argument(
                "--save-config", help="save the analysed model as config yaml"
            )

        decohere = subparsers.add_parser("decohere", help="medium decoherence report")
        add_model_args(decohere, "δ values of the partial decoherence model")
        probs = subparsers.add_parser(
            "probs", help="history measures, present chances and retrodictions"
        )
        add_model_args(probs, "δ of the partial decoherence model")
        probs.add_argument(
            "--what",
            choices=["measures", "present", "retro"],
            default="measures",
            help="which table to show [default: %(default)s]",
        )
        compare = subparsers.add_parser(
            "compare", help="minimalist versus fatalist future probabilities"
        )
        add_model_args(
            compare, "δ values of the partial decoherence model e.g. 0,0.1,0.5,1"
        )
        tree = subparsers.add_parser("tree", help="branch count versus branch measure")
        tree.add_argument(
            "--N", type=int, default=20, help="number of trials [default: %(default)s]"
        )
        tree.add_argument(
            "--M", type=int, default=2, help="outcomes per trial [default: %(default)s]"
        )
        tree.add_argument(
            "--window",
            type=window,
            default=FrequencyQuery(0, 0.4, 0.6),
            help="lo:hi [default: 0.4:0.6]",
        )
        tree.add_argument(
            "--p",
            type=float_list,
            default=[0.5],
            help="weights of outcome 0 e.g. 0.5,0.9,0.99",
        )
        bernoulli = subparsers.add_parser(
            "bernoulli", help="measure inside and outside p ± width along N"
        )
        bernoulli.add_argument(
            "--p", type=float_list, default=[0.5, 0.9], help="[default: 0.5,0.9]"
        )
        bernoulli.add_argument(
            "--N",
            type=int_list,
            default=[10, 50, 100, 500],
            help="[default: 10,50,100,500]",
        )
        bernoulli.add_argument(
            "--width",
            type=float,
            default=0.05,
            help="half width of the window [default: %(default)s]",
        )
        ergodic = subparsers.add_parser(
            "ergodic", help="time average series of a discrete map"
        )
        ergodic.add_argument(
            "--map",
            choices=["rotation", "identity"],
            default="rotation",
            help="[default: %(default)s]",
        )
        ergodic.add_argument(
            "--alpha", type=float, help="rotation angle [default: golden ratio]"
        )
        ergodic.add_argument(
            "--x0", type=float_list, default=[0.0], help="initial point(s) [default: 0]"
        )
        ergodic.add_argument(
            "--region",
            type=float_list,
            default=[0.0, 0.3],
            help="interval lo,hi [default: 0,0.3]",
        )
        ergodic.add_argument(
            "--T",
            type=int_list,
            default=[10, 100, 1000, 10**4, 10**5, 10**6],
            help="step counts",
        )
        ergodic.add_argument(
            "--bins",
            type=int,
            help="show the empirical density on this many cells instead",
        )
        return parser

    def handle_args(self) -> bool:
        """
        handle the parsed command line arguments

        Returns:
            bool: True if a command was handled
        """
        args = self.args
        if args.about:
            print(self.version.longDescription, file=sys.stderr)
            print(f"see {self.version.doc_url}", file=sys.stderr)
        if args.command is None:
            if not args.about:
                self.parser.print_usage(sys.stderr)
                self.exit_code = 1
            return False
        self.settings = Settings.load(args.settings)
        self.tolerance: Tolerance = self.settings.tolerance(args.tol)
        self.budget = self.settings.budget()
        profiler = Profiler(args.command, profile=args.debug)
        handler = getattr(self, f"cmd_{args.command}")
        lod = handler(args)
        profiler.time(f" with {len(lod)} rows")
        self.show(lod)
        return True

    def get_spaces(self, args: Namespace) -> List[HistorySpace]:
        """
        the model spaces selected by the arguments - one per δ for the partial decoherence model

        all spaces are validated at the τ_alg of the --tol flag or the settings
        """
        tol = self.tolerance.alg
        if args.config:
            spaces = [build_space(load_config(args.config), tol)]
        elif args.model == "bernoulli":
            spaces = [hilbert_bernoulli_model(args.N, args.p, args.present, tol)]
        elif args.model == "partial-decoherence":
            spaces = [partial_decoherence_model(delta, tol) for delta in args.delta]
        elif args.model == "tree":
            weights = args.weights if args.weights else [args.p, 1.0 - args.p]
            tree = BranchTree.uniform(args.N, weights)
            spaces = [hilbert_tree_model(tree, args.present, tol=tol)]
        else:
            spaces = [division_model(tol)]
        if args.save_config:
            if len(spaces) > 1:
                logging.warning(
                    f"--save-config saves the first of {len(spaces)} models only"
                )
            save_config(dump_space(spaces[0]), args.save_config)
        return spaces

    def cmd_decohere(self, args: Namespace) -> List[dict]:
        """
        the decoherence report of each selected space
        """
        lod = []
        for space in self.get_spaces(args):
            progress_bar = None
            if args.progress:
                progress_bar = TqdmProgressbar(
                    total=space.n_histories(), desc="decoherence", unit="history"
                )
            report = decoherence_report(
                space,
                eps_dec=self.tolerance.dec,
                tol=self.tolerance.alg,
                budget=self.budget,
                progress_bar=progress_bar,
            )
            lod.append({"model": space.name, **report.to_dict()})
        return lod

    def cmd_probs(self, args: Namespace) -> List[dict]:
        """
        minimalist and retrodictive chances for every present outcome
        """
        space = self.get_spaces(args)[0]
        tol = self.tolerance.alg
        lod = []
        if args.what == "measures":
            for h in iter_histories(space):
                lod.append({**h.to_dict(), "measure": absolute_measure(h, tol)})
        else:
            for index in range(len(space.decompositions[space.present_position])):
                alpha_0 = space.present_event(index)
                if args.what == "present":
                    lod.append(
                        {
                            "present": str(alpha_0),
                            "born": segment_measure(alpha_0),
                            "chance": chance_of_present(alpha_0, space, self.budget),
                        }
                    )
                elif chance_of_present(alpha_0, space, self.budget) > tol:
                    for alpha_p, chance in retrodictive_chances(
                        alpha_0, space, tol, self.budget
                    ):
                        lod.append(
                            {
                                "present": str(alpha_0),
                                "past": str(alpha_p),
                                "chance": chance,
                            }
                        )
        return lod

    def cmd_compare(self, args: Namespace) -> List[dict]:
        """
        minimalist versus fatalist predictions per δ
        """
        lod = []
        tol = self.tolerance.alg
        for delta, space in zip(args.delta, self.get_spaces(args)):
            if args.model == "partial-decoherence" and not args.config:
                queries = [reference_query(space)]
            else:
                queries = [
                    (alpha_f, space.present_event(index))
                    for index in range(
                        len(space.decompositions[space.present_position])
                    )
                    if segment_measure(space.present_event(index)) > tol
                    for alpha_f in iter_histories(space, space.future_range())
                ]
            for alpha_f, alpha_0 in queries:
                views = compare_views(
                    alpha_f, alpha_0, space, self.tolerance.dec, tol, self.budget
                )
                mixture = mixture_comparison(alpha_f, alpha_0, space, tol, self.budget)
                record = {"model": space.name}
                if args.model == "partial-decoherence" and not args.config:
                    record["delta"] = delta
                record.update(views.to_dict())
                record["mixture_joint_gap"] = mixture.joint_gap
                lod.append(record)
        return lod

    def cmd_tree(self, args: Namespace) -> List[dict]:
        query = args.window
        counted = count_fraction(args.N, query, args.M)
        lod = []
        for p in args.p:
            rest = (1.0 - p) / (args.M - 1)
            tree = BranchTree.uniform(args.N, [p] + [rest] * (args.M - 1))
            lod.append(
                {
                    "N": args.N,
                    "M": args.M,
                    "lo": query.lo,
                    "hi": query.hi,
                    "p": p,
                    "count_fraction": float(counted),
                    "measure_fraction": measure_fraction(tree, query),
                }
            )
        return lod

    def cmd_bernoulli(self, args: Namespace) -> List[dict]:
        lod = []
        for p in args.p:
            lod.extend(bernoulli_series(p, args.N, args.width))
        return lod

    def cmd_ergodic(self, args: Namespace) -> List[dict]:
        if len(args.region) != 2:
            raise ValueError(f"region needs lo,hi but is {args.region}")
        region = Interval(*args.region)
        if args.map == "rotation":
            dmap = Rotation() if args.alpha is None else Rotation([args.alpha])
        else:
            dmap = IdentityMap()
        dmap = dmap.with_x0([args.x0[0]])
        if args.bins:
            return empirical_density(dmap, args.bins, max(args.T)).to_lod()
        if len(args.x0) > 1:
            x0s = [[x0] for x0 in args.x0]
            return x0_sensitivity(dmap, region, max(args.T), x0s).to_lod()
        return convergence_series(dmap, region, args.T)

    def header(self) -> str:
        args = self.args
        return (
            f"# {self.version.name} {self.version.version} {args.command}"
            f" seed={args.seed} tol_alg={self.tolerance.alg!r} eps_dec={self.tolerance.dec!r}"
        )

    def show(self, lod: List[dict]):
        """
        show the given list of dicts on stdout
        """
        if self.args.format == "json":
            meta = {
                "program": self.version.name,
                "version": self.version.version,
                "command": self.args.command,
                "seed": self.args.seed,
                "tol_alg": self.tolerance.alg,
                "eps_dec": self.tolerance.dec,
            }
            print(json.dumps({"meta": meta, "rows": lod}, indent=2, ensure_ascii=False))
        else:
            print(self.header())
            if lod:
                print(CSV.get_instance().toCSV(lod), end="")

    def cmd_main(self, argv: list = None) -> int:
        """
        main program as an instance

        Args:
            argv(list): list of command line arguments

        Returns:
            int: exit code - 0 ok, 1 invalid input or usage, 2 resource budget exceeded
        """
        if argv is None:
            argv = sys.argv[1:]
        version_msg = f"{self.version.name} {self.version.version} {self.version.updated}"
        try:
            self.parser = self.getArgParser(
                description=self.version.description, version_msg=version_msg
            )
            self.args = self.parser.parse_args(argv)
        except SystemExit as exit_ex:
            return exit_ex.code if isinstance(exit_ex.code, int) else 1
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if self.args.debug else logging.WARNING,
        )
        try:
            self.handle_args()
        except KeyboardInterrupt:
            return 1
        except ResourceBudgetError as ex:
            self.report_error(ex)
            return 2
        except (HistoriesError, ValueError, OSError) as ex:
            self.report_error(ex)
            return 1
        return self.exit_code

    def report_error(self, ex: Exception):
        indent = len(self.program_name) * " "
        sys.stderr.write(f"{self.program_name}: {ex}\n")
        sys.stderr.write(f"{indent}  for help use --help\n")
        if self.args.debug:
            print(traceback.format_exc(), file=sys.stderr)


def main(argv: list = None) -> int:
    """
    main call
    """
    cmd = HistoriesCmd()
    exit_code = cmd.cmd_main(argv)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
