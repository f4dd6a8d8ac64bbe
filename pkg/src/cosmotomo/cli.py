"""Command-line front end: ``cosmotomo {simulate,reconstruct,spectrum,picard,visible}``.

Exit status is 0 on success, 2 for configuration/input errors and 3 for
numerical failures.
"""
import argparse
import logging
import os
import sys
from dataclasses import replace

import numpy as np

from . import io
from .analysis import picard_data, singular_spectrum, visible_mask
from .config import ConfigError, ExperimentConfig, load_config
from .grid import GridError, GridSpec
from .model import BudgetError, ForwardModel, NoiseSpec, PhantomSpec, add_noise, make_phantom, relative_error
from .raytrace import DetectorMask
from .solvers import edge_preserving_reconstruct, fista_l1, lsqr, solve_ls_direct
from .solvers.history import SolveHistory

log = logging.getLogger("cosmotomo")


class NumericalFailure(RuntimeError):
    pass


def _grid(cfg):
    return GridSpec(cfg.n, cfg.extent, cfg.t_final, cfg.n_slices)


def _model(cfg):
    spec = _grid(cfg)
    return ForwardModel.build(spec, DetectorMask.from_label(spec, cfg.detectors))


def _outdir(cfg):
    os.makedirs(cfg.output_dir, exist_ok=True)
    return cfg.output_dir


def _read_data(path, model):
    b = io.read_vector_csv(path)
    if len(b) != model.shape[0]:
        raise ConfigError(f"{path} holds {len(b)} values, the model has {model.shape[0]} rays")
    if not np.all(np.isfinite(b)):
        raise NumericalFailure(f"{path} contains non-finite values")
    return b


def cmd_simulate(cfg):
    model = _model(cfg)
    spec = model.spec
    ftrue = make_phantom(
        PhantomSpec(cfg.phantom, cfg.phantom_count, cfg.phantom_box, cfg.phantom_amplitude, cfg.phantom_seed),
        spec,
    )
    clean = model.apply(ftrue)
    b, e = add_noise(clean, NoiseSpec(cfg.noise_level, cfg.noise_seed))
    out = _outdir(cfg)
    io.write_image_csv(os.path.join(out, "f_true.csv"), ftrue, spec.n)
    io.write_pgm(os.path.join(out, "f_true.pgm"), ftrue, spec.n)
    io.write_vector_csv(os.path.join(out, "b.csv"), b, "b")
    with open(os.path.join(out, "noise.csv"), "w") as fh:
        fh.write("m,noise_level,e_norm,clean_norm\n")
        fh.write(f"{len(b)},{io.FMT % cfg.noise_level},{io.FMT % np.linalg.norm(e)},"
                 f"{io.FMT % np.linalg.norm(clean)}\n")
    log.info("simulated %d observations into %s", len(b), out)
    return b


def cmd_reconstruct(cfg, b_path, ftrue_path=None):
    model = _model(cfg)
    spec = model.spec
    b = _read_data(b_path, model)
    ftrue = io.read_image_csv(ftrue_path) if ftrue_path else None
    if ftrue is not None and len(ftrue) != spec.size:
        raise ConfigError(f"{ftrue_path} does not match the {spec.n}x{spec.n} grid")

    if cfg.method == "ls":
        f = solve_ls_direct(model, b)
        res = np.linalg.norm(model.apply(f) - b) / np.linalg.norm(b)
        err = None if ftrue is None else [relative_error(f, ftrue)]
        hist = SolveHistory(final=f, residual_norms=[res], error_norms=err)
    elif cfg.method == "lsqr":
        hist = lsqr(model.apply, model.adjoint, b, cfg.max_iters, f_true=ftrue,
                    keep_iterates=cfg.keep_iterates)
    elif cfg.method == "fista":
        hist = fista_l1(model.apply, model.adjoint, b, cfg.lam, cfg.max_iters, f_true=ftrue,
                        keep_iterates=cfg.keep_iterates)
    else:
        hist = edge_preserving_reconstruct(
            model.apply, model.adjoint, b, spec.n, K=cfg.outer_iters,
            lambda_schedule=cfg.schedule(), beta=cfg.beta, cg_max=cfg.cg_max, cg_tol=cfg.tol,
            f_true=ftrue, keep_iterates=cfg.keep_iterates,
        )
    if not np.all(np.isfinite(hist.final)):
        raise NumericalFailure("reconstruction produced non-finite values")

    out = _outdir(cfg)
    footer = {"method": cfg.method, "iterations": len(hist)}
    if hist.error_norms is not None:
        footer["final_err_rel"] = float(hist.error_norms[-1])
        footer["best_index"] = hist.best_index + 1
        footer["best_err_rel"] = float(hist.error_norms[hist.best_index])
    io.write_image_csv(os.path.join(out, "fhat.csv"), hist.final, spec.n)
    io.write_pgm(os.path.join(out, "fhat.pgm"), hist.final, spec.n)
    io.write_history_csv(os.path.join(out, "history.csv"), hist, footer)
    if cfg.keep_iterates and hist.best is not None:
        io.write_image_csv(os.path.join(out, "fbest.csv"), hist.best, spec.n)
    return hist


def cmd_spectrum(cfg):
    model = _model(cfg)
    spectrum = singular_spectrum(model, cfg.rank_tolerance)
    out = _outdir(cfg)
    io.write_spectrum_csv(os.path.join(out, "spectrum.csv"), spectrum)
    with open(os.path.join(out, "spectrum_summary.csv"), "w") as fh:
        kappa = "inf" if spectrum.is_singular else io.FMT % spectrum.kappa
        fh.write("m,n_unknowns,rank,kappa\n")
        fh.write(f"{model.shape[0]},{model.shape[1]},{spectrum.rank},{kappa}\n")
    print(f"m = {model.shape[0]}  kappa = {kappa}")
    return spectrum


def cmd_picard(cfg, b_path):
    model = _model(cfg)
    b = _read_data(b_path, model)
    pic = picard_data(model, b, cfg.rank_tolerance)
    io.write_picard_csv(os.path.join(_outdir(cfg), "picard.csv"), pic)
    return pic


def cmd_visible(cfg):
    spec = _grid(cfg)
    mask = DetectorMask.from_label(spec, cfg.detectors)
    tol = None if cfg.visible_tolerance == "auto" else float(cfg.visible_tolerance)
    vm = visible_mask(spec, mask, tol)
    out = _outdir(cfg)
    io.write_mask_csv(os.path.join(out, "visible.csv"), vm.mask, spec.n)
    io.write_pgm(os.path.join(out, "visible.pgm"), vm.mask.astype(float), spec.n)
    return vm


def build_parser():
    parser = argparse.ArgumentParser(prog="cosmotomo", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="DIR", help="output directory (overrides output_dir)")
        p.add_argument("--seed", type=int, metavar="N", help="override phantom and noise seeds")
        return p

    common(sub.add_parser("simulate", help="phantom, forward data and noise"))
    p = common(sub.add_parser("reconstruct", help="reconstruct from data"))
    p.add_argument("data", metavar="B_PATH")
    p.add_argument("--ftrue", metavar="PATH", help="reference image; enables error histories")
    common(sub.add_parser("spectrum", help="singular values and condition number"))
    p = common(sub.add_parser("picard", help="Picard plot data"))
    p.add_argument("data", metavar="B_PATH")
    common(sub.add_parser("visible", help="visible-set mask"))
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg = cfg.with_seed(args.seed)
        if args.out:
            cfg = replace(cfg, output_dir=args.out)
        if args.command == "simulate":
            cmd_simulate(cfg)
        elif args.command == "reconstruct":
            cmd_reconstruct(cfg, args.data, args.ftrue)
        elif args.command == "spectrum":
            cmd_spectrum(cfg)
        elif args.command == "picard":
            cmd_picard(cfg, args.data)
        else:
            cmd_visible(cfg)
    # LinAlgError subclasses ValueError, so numerical failures go first
    except (NumericalFailure, BudgetError, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"cosmotomo: numerical failure: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, GridError, OSError, ValueError) as exc:
        print(f"cosmotomo: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
