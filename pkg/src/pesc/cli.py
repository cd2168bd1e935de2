"""Command-line surface: synth, deconv, metrics.

Exit codes are a stable contract: 0 success, 1 numeric failure,
2 usage/input error.  Every command writes a JSON-lines manifest next to
its primary output with all parameters resolved (including the epsilon
picked up from PESC_DEFAULT_EPS), so a finished run can be reproduced
byte-identically with ``rerun``.
"""

import argparse
import math
import os
import sys

import numpy as np

from . import __version__
from .core import NumericError, convolve_full
from .epigraph import EpigraphConfig
from .formats import (
    RunManifest,
    manifest_path_for,
    read_kernel,
    read_manifest,
    read_pgm,
    write_manifest,
    write_pgm,
    write_trace,
)
from .metrics import isnr, snr
from .solver import SolverConfig, deconvolve, trace_to_rows
from .synth import DegradationSpec, degrade

DEFAULT_EPS = 1e-3
DEFAULT_OUTER_ITERS = 10
DEFAULT_MAX_INNER_ITERS = 200


def default_eps() -> float:
    """Stopping epsilon: PESC_DEFAULT_EPS overrides the built-in default."""
    raw = os.environ.get("PESC_DEFAULT_EPS")
    if raw is None:
        return DEFAULT_EPS
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"PESC_DEFAULT_EPS is not a number: {raw!r}")
    if value <= 0:
        raise ValueError(f"PESC_DEFAULT_EPS must be positive, got {value}")
    return value


def run_synth(clean, kernel, bsnr, seed, out, sigma_out) -> int:
    clean_img = read_pgm(clean)
    k = read_kernel(kernel)
    spec = DegradationSpec(kernel=k, target_bsnr_db=bsnr, seed=seed)
    z, sigma = degrade(clean_img, spec)
    z_tilde = convolve_full(clean_img, k)
    noise_energy = float(np.sum((z - z_tilde) ** 2))
    signal_energy = float(np.sum((z_tilde - z_tilde.mean()) ** 2))
    if noise_energy > 0:
        empirical = 10.0 * math.log10(signal_energy / noise_energy)
    else:
        empirical = float("inf")
    write_pgm(out, z)
    with open(sigma_out, "w") as fh:
        fh.write(f"sigma={sigma:.17g}\n")
        fh.write(f"target_bsnr_db={bsnr:.17g}\n")
        fh.write(f"empirical_bsnr_db={empirical:.17g}\n")
    write_manifest(
        manifest_path_for(out),
        RunManifest(
            command="synth",
            params={
                "clean": clean,
                "kernel": kernel,
                "bsnr": bsnr,
                "seed": seed,
                "out": out,
                "sigma_out": sigma_out,
            },
            version=__version__,
        ),
    )
    return 0


def run_deconv(blurred, kernel, cost, outer_iters, eps, slab_eps, truth, out, trace) -> int:
    z = read_pgm(blurred)
    k = read_kernel(kernel)
    truth_img = None
    if truth is not None:
        truth_img = read_pgm(truth)
        if truth_img.shape != z.shape:
            raise ValueError(
                f"truth shape {truth_img.shape} does not match blurred shape {z.shape}"
            )
    cfg = SolverConfig(
        outer_iters=outer_iters,
        epigraph=EpigraphConfig(eps=eps, max_iters=DEFAULT_MAX_INNER_ITERS, exact=False),
        cost=cost,
        use_slabs=slab_eps is not None,
        slab_eps=slab_eps,
    )
    restored, run_trace = deconvolve(z, k, cfg, ground_truth=truth_img)
    write_pgm(out, restored)
    if trace is not None:
        write_trace(trace, trace_to_rows(run_trace))
    if truth_img is not None:
        print(f"ISNR_dB={isnr(z, restored, truth_img):.4f} SNR_dB={snr(restored, truth_img):.4f}")
    write_manifest(
        manifest_path_for(out),
        RunManifest(
            command="deconv",
            params={
                "blurred": blurred,
                "kernel": kernel,
                "cost": cost,
                "outer_iters": outer_iters,
                "eps": eps,
                "slab_eps": slab_eps,
                "truth": truth,
                "out": out,
                "trace": trace,
            },
            version=__version__,
        ),
    )
    return 0


def run_metrics(orig, degraded, restored) -> int:
    orig_img = read_pgm(orig)
    degraded_img = read_pgm(degraded)
    restored_img = read_pgm(restored)
    if not (orig_img.shape == degraded_img.shape == restored_img.shape):
        raise ValueError(
            f"shape mismatch: orig {orig_img.shape}, degraded {degraded_img.shape}, "
            f"restored {restored_img.shape}"
        )
    # BSNR itself needs the noise level; its derivable ingredient is the
    # mean-centred energy of the degraded input.
    signal_energy = float(np.sum((degraded_img - degraded_img.mean()) ** 2))
    print(f"BSNR_SIGNAL_ENERGY={signal_energy:.4f}")
    print(f"ISNR_dB={isnr(degraded_img, restored_img, orig_img):.4f}")
    print(f"SNR_dB={snr(restored_img, orig_img):.4f}")
    return 0


def rerun(manifest_path) -> int:
    """Re-execute a finished run from its manifest (byte-identical outputs)."""
    manifest = read_manifest(manifest_path)
    runners = {"synth": run_synth, "deconv": run_deconv, "metrics": run_metrics}
    try:
        runner = runners[manifest.command]
    except KeyError:
        raise ValueError(f"manifest names unknown command {manifest.command!r}")
    return runner(**manifest.params)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pesc",
        description="Deconvolution by alternating projections between "
        "measurement hyperplanes and the epigraph of a convex cost.",
    )
    parser.add_argument("--version", action="version", version=f"pesc {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="blur a clean image and add BSNR-calibrated noise")
    p_synth.add_argument("clean", help="clean input image (PGM)")
    p_synth.add_argument("--kernel", required=True, help="kernel text file")
    p_synth.add_argument("--bsnr", type=float, required=True, help="target BSNR in dB (inf = noiseless)")
    p_synth.add_argument("--seed", type=int, default=0, help="noise RNG seed")
    p_synth.add_argument("--out", required=True, help="degraded output image (PGM)")
    p_synth.add_argument("--sigma-out", required=True, help="sidecar recording sigma and achieved BSNR")

    p_deconv = sub.add_parser("deconv", help="restore a blurred, noisy image")
    p_deconv.add_argument("blurred", help="degraded input image (PGM)")
    p_deconv.add_argument("--kernel", required=True, help="kernel text file")
    p_deconv.add_argument("--cost", choices=("tv", "l1", "l2"), default="tv")
    p_deconv.add_argument("--outer-iters", "-K", type=int, default=DEFAULT_OUTER_ITERS)
    p_deconv.add_argument("--eps", type=float, default=None,
                          help="epigraph stopping epsilon (default from PESC_DEFAULT_EPS or 1e-3)")
    p_deconv.add_argument("--slab-eps", type=float, default=None,
                          help="use measurement slabs of this half-width instead of hyperplanes")
    p_deconv.add_argument("--truth", default=None, help="ground-truth image for ISNR/SNR reporting")
    p_deconv.add_argument("--out", required=True, help="restored output image (PGM)")
    p_deconv.add_argument("--trace", default=None, help="optional convergence trace CSV")

    p_metrics = sub.add_parser("metrics", help="report quality metrics for a restoration")
    p_metrics.add_argument("orig", help="ground-truth image (PGM)")
    p_metrics.add_argument("degraded", help="degraded image (PGM)")
    p_metrics.add_argument("restored", help="restored image (PGM)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        if args.command == "synth":
            return run_synth(args.clean, args.kernel, args.bsnr, args.seed, args.out,
                             args.sigma_out)
        if args.command == "deconv":
            eps = args.eps if args.eps is not None else default_eps()
            return run_deconv(args.blurred, args.kernel, args.cost, args.outer_iters,
                              eps, args.slab_eps, args.truth, args.out, args.trace)
        return run_metrics(args.orig, args.degraded, args.restored)
    except NumericError as exc:
        print(f"pesc: numeric failure: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, IndexError, KeyError) as exc:
        print(f"pesc: error: {exc}", file=sys.stderr)
        return 2


def console_main():
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
