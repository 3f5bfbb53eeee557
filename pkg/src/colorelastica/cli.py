"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 solver failure, 3 I/O error.
"""

import argparse
import logging
import sys

from .config import NewtonSettings, SolverConfig
from .degrade import NoiseSpec, blur, make_kernel
from .errors import ImageIOError, SolverError
from .image_core import load_image, save_image
from .quality import evaluate
from .spectral import BlurKernel
from .splitting import run, write_trace

EXIT_OK, EXIT_USAGE, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("colorelastica")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _motion(text):
    try:
        length, angle = text.split(",")
        return int(length), float(angle)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LENGTH,ANGLE, got {text!r}") from None


def _add_solver_flags(p):
    d = SolverConfig()
    p.add_argument("--alpha", type=float, default=d.alpha, help="space/color ratio (default: %(default)s)")
    p.add_argument("--beta", type=float, default=d.beta, help="elastica weight (default: %(default)s)")
    p.add_argument("--eta", type=float, default=d.eta, help="fidelity weight (default: %(default)s)")
    p.add_argument("--tau", type=float, default=d.tau, help="time step (default: %(default)s)")
    p.add_argument("--gamma1", type=float, default=d.gamma1, help="lambda relaxation (default: %(default)s)")
    p.add_argument("--gamma2", type=float, default=d.gamma2, help="metric relaxation (default: %(default)s)")
    p.add_argument("--tol", type=float, default=d.stop_tol, help="stopping threshold on |u^{n+1}-u^n| (default: %(default)s)")
    p.add_argument("--stop-norm", choices=("l2", "linf"), default=d.stop_norm, help="norm of the stopping test (default: %(default)s)")
    p.add_argument("--max-iters", type=int, default=d.max_outer_iters, help="outer iteration cap (default: %(default)s)")
    p.add_argument("--newton-tol", type=float, default=d.newton.tol, help="Newton step tolerance (default: %(default)s)")
    p.add_argument(
        "--newton-max-iters", type=int, default=d.newton.max_iters, help="Newton iteration cap per pixel (default: %(default)s)"
    )
    p.add_argument(
        "--accept-nonconverged",
        action="store_true",
        help="keep the last Newton iterate at pixels that miss the tolerance instead of failing (default: off)",
    )
    p.add_argument("--init", choices=("input", "zeros"), default=d.init_mode, help="initial u (default: %(default)s)")
    p.add_argument("--trace", help="write the energy trace CSV here (default: none)")


def _add_kernel_flags(p, required):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--kernel", help="kernel text file: 'rows cols' then row-major taps (default: none)")
    g.add_argument("--motion", type=_motion, metavar="L,THETA", help="motion blur of L taps at THETA degrees (default: none)")


def build_parser():
    parser = _Parser(prog="color-elastica", description="Color elastica image restoration.")
    parser.add_argument("-q", "--quiet", action="store_true", help="only log warnings (default: off)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("denoise", help="denoise an image")
    p.add_argument("--in", dest="input", required=True, help="noisy input image")
    p.add_argument("--out", required=True, help="output image")
    _add_solver_flags(p)

    p = sub.add_parser("deblur", help="deblur and denoise an image")
    p.add_argument("--in", dest="input", required=True, help="blurred input image")
    p.add_argument("--out", required=True, help="output image")
    _add_kernel_flags(p, required=True)
    _add_solver_flags(p)

    p = sub.add_parser("degrade", help="blur and/or add noise to an image")
    p.add_argument("--in", dest="input", required=True, help="clean input image")
    p.add_argument("--out", required=True, help="output image")
    _add_kernel_flags(p, required=False)
    noise = p.add_mutually_exclusive_group()
    noise.add_argument("--gaussian-sd", type=float, help="Gaussian noise deviation (default: none)")
    noise.add_argument("--poisson-photons", type=float, help="Poisson photon count P (default: none)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")

    p = sub.add_parser("evaluate", help="print PSNR and SSIM of --test against --ref")
    p.add_argument("--ref", required=True, help="reference image")
    p.add_argument("--test", required=True, help="image to score")
    return parser


def config_from_args(args):
    try:
        return SolverConfig(
            alpha=args.alpha,
            beta=args.beta,
            eta=args.eta,
            tau=args.tau,
            gamma1=args.gamma1,
            gamma2=args.gamma2,
            stop_tol=args.tol,
            stop_norm=args.stop_norm,
            max_outer_iters=args.max_iters,
            newton=NewtonSettings(
                tol=args.newton_tol,
                max_iters=args.newton_max_iters,
                accept_nonconverged=args.accept_nonconverged,
            ),
            init_mode=args.init,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _kernel_from_args(args):
    if args.kernel:
        try:
            return BlurKernel.from_file(args.kernel)
        except OSError as exc:
            raise ImageIOError(f"{args.kernel}: {exc.strerror or exc}") from exc
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    if args.motion:
        length, angle = args.motion
        try:
            return make_kernel("motion", length=length, angle=angle)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    return None


def _solve(args, kernel=None):
    cfg = config_from_args(args)
    f = load_image(args.input)
    result = run(f, cfg, kernel=kernel)
    save_image(result.u, args.out)
    if args.trace:
        try:
            write_trace(result.trace, args.trace)
        except OSError as exc:
            raise ImageIOError(f"{args.trace}: {exc.strerror or exc}") from exc
    status = "converged" if result.converged else "iteration cap reached"
    log.info("%s after %d iterations, energy %.10g", status, result.iterations, result.trace[-1].energy)


def _degrade(args):
    img = load_image(args.input)
    kernel = _kernel_from_args(args)
    if kernel is not None:
        img = blur(img, kernel)
    try:
        if args.gaussian_sd is not None:
            img = NoiseSpec("gaussian", sd=args.gaussian_sd, seed=args.seed).apply(img)
        elif args.poisson_photons is not None:
            img = NoiseSpec("poisson", photons=args.poisson_photons, seed=args.seed).apply(img)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    save_image(img, args.out)


def _evaluate(args):
    ref, test = load_image(args.ref), load_image(args.test)
    if ref.shape != test.shape:
        raise UsageError(f"image shapes differ: {ref.shape} vs {test.shape}")
    try:
        report = evaluate(ref, test)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    print(report)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or EXIT_OK

    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO, format="%(message)s", stream=sys.stderr)
    try:
        if args.command == "denoise":
            _solve(args)
        elif args.command == "deblur":
            _solve(args, _kernel_from_args(args))
        elif args.command == "degrade":
            _degrade(args)
        else:
            _evaluate(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ImageIOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
