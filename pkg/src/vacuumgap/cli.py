"""Batch command-line front end.

Reads a JSON scenario (schema 1), runs a sweep by calling the library
per point, and writes CSV (default) or JSON rows with both SI and
natural-unit values plus the numerics metadata needed to reproduce them.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.

Output is deterministic: fixed evaluation order, 12-significant-digit
'%.12e' formatting, rows written in sweep order regardless of worker
completion order.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv as csv_module
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Optional

from . import units
from .errors import (
    ConfigError,
    IllConditioned,
    InvalidInput,
    NonConvergence,
    ResidualTooLarge,
    VacuumGapError,
)
from .casimir_polder import AtomScene, cp_energy_dielectric, cp_energy_perfect_conductor
from .gratings import FlatProfile, GratingScene, grating_energy_T0, grating_free_energy, sinusoidal_profile
from .lifshitz import (
    PlanePlaneScene,
    asymptote_graphene_metal_highT,
    asymptote_ideal_highT,
    energy_per_area_T0,
    free_energy_per_area,
    pressure,
    zero_mode_terms,
)
from .materials import (
    ConstantEps,
    DrudeModel,
    GrapheneZeroModeModel,
    IdealConductor,
    LorentzPolarizability,
    Polarizability,
    PlasmaModel,
    StaticPolarizability,
    SuperconductorModel,
    TabulatedEps,
)
from .quadrature import Tolerance, central_derivative
from .reflection import (
    fresnel_provider,
    ideal_provider,
    layer_provider,
    superconductor_zero_mode_provider,
)

MODES = ("plane-plane", "casimir-polder", "grating", "asymptotics")


def _fail(msg: str) -> ConfigError:
    return ConfigError(msg)


def _require(cfg: dict, field: str, context: str = "config"):
    if field not in cfg:
        raise _fail(f"{context}: missing field '{field}'")
    return cfg[field]


def _positive(value, field: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise _fail(f"field '{field}' must be a number, got {value!r}")
    if not value > 0.0:
        raise _fail(f"field '{field}' must be > 0, got {value}")
    return value


def _nonnegative(value, field: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise _fail(f"field '{field}' must be a number, got {value!r}")
    if value < 0.0:
        raise _fail(f"field '{field}' must be >= 0, got {value}")
    return value


def load_tabulated_csv(path: str) -> TabulatedEps:
    """Permittivity samples: CSV with header 'omega_eV,eps_iw', strictly
    increasing omega."""
    omegas = []
    eps = []
    try:
        with open(path, newline="") as fh:
            reader = csv_module.reader(fh)
            header = next(reader, None)
            if header is None or [h.strip() for h in header[:2]] != ["omega_eV", "eps_iw"]:
                raise _fail(f"{path}: expected header 'omega_eV,eps_iw'")
            for row in reader:
                if not row or not row[0].strip():
                    continue
                omegas.append(float(row[0]))
                eps.append(float(row[1]))
    except OSError as exc:
        raise _fail(f"cannot read tabulated permittivity {path}: {exc}")
    except ValueError as exc:
        raise _fail(f"{path}: malformed number ({exc})")
    try:
        return TabulatedEps(omegas, eps)
    except InvalidInput as exc:
        raise _fail(f"{path}: {exc}")


def build_material(block: dict, context: str):
    kind = _require(block, "kind", context)
    try:
        if kind == "ideal":
            return IdealConductor()
        if kind == "constant":
            return ConstantEps(_positive(_require(block, "eps", context), f"{context}.eps"))
        if kind == "plasma":
            return PlasmaModel(_positive(_require(block, "omega_pl_eV", context), f"{context}.omega_pl_eV"))
        if kind == "drude":
            return DrudeModel(
                _positive(_require(block, "omega_pl_eV", context), f"{context}.omega_pl_eV"),
                _nonnegative(_require(block, "gamma_eV", context), f"{context}.gamma_eV"),
            )
        if kind == "tabulated":
            return load_tabulated_csv(str(_require(block, "file", context)))
    except InvalidInput as exc:
        raise _fail(f"{context}: {exc}")
    raise _fail(f"{context}: unknown material kind '{kind}'")


def _material_provider(block: dict, context: str):
    if block.get("kind") == "ideal":
        return ideal_provider()
    return fresnel_provider(build_material(block, context))


@dataclass(frozen=True)
class SweepSpec:
    variable: str
    values: tuple


def parse_sweep(cfg: dict, default_variable: str, default_value: float) -> SweepSpec:
    sweep = cfg.get("sweep")
    if sweep is None:
        return SweepSpec(default_variable, (default_value,))
    variable = str(_require(sweep, "variable", "sweep"))
    start = _positive(_require(sweep, "start", "sweep"), "sweep.start")
    stop = _positive(_require(sweep, "stop", "sweep"), "sweep.stop")
    points = _require(sweep, "points", "sweep")
    if not isinstance(points, int) or points < 1:
        raise _fail(f"sweep.points must be a positive integer, got {points!r}")
    if stop < start:
        raise _fail(f"sweep bounds must be ordered, got start={start} > stop={stop}")
    spacing = sweep.get("spacing", "linear")
    if spacing not in ("linear", "log"):
        raise _fail(f"sweep.spacing must be 'linear' or 'log', got {spacing!r}")
    if points == 1:
        values = (start,)
    elif spacing == "linear":
        step = (stop - start) / (points - 1)
        values = tuple(start + i * step for i in range(points))
    else:
        ratio = (stop / start) ** (1.0 / (points - 1))
        values = tuple(start * ratio**i for i in range(points))
    return SweepSpec(variable, values)


class Scenario:
    """Validated configuration; evaluate_point runs one sweep value."""

    def __init__(self, cfg: dict, tol_override: Optional[float] = None):
        if not isinstance(cfg, dict):
            raise _fail("config root must be a JSON object")
        schema = cfg.get("schema")
        if schema != 1:
            raise _fail(f"unsupported schema {schema!r} (expected 1)")
        self.mode = _require(cfg, "mode")
        if self.mode not in MODES:
            raise _fail(f"mode must be one of {MODES}, got {self.mode!r}")
        numerics = cfg.get("numerics", {})
        rel = tol_override if tol_override is not None else numerics.get("tol", 1e-8)
        rel = _positive(rel, "numerics.tol")
        self.tol = Tolerance(rel=rel, abs=1e-300)
        self.j_max = numerics.get("J", 5)
        if not isinstance(self.j_max, int) or self.j_max < 0:
            raise _fail(f"numerics.J must be a non-negative integer, got {self.j_max!r}")
        self.max_terms = numerics.get("max_terms", 100_000)
        if not isinstance(self.max_terms, int) or self.max_terms < 1:
            raise _fail(f"numerics.max_terms must be a positive integer, got {self.max_terms!r}")
        self.temperature_k = _nonnegative(cfg.get("temperature_K", 0.0), "temperature_K")
        self.geometry = cfg.get("geometry", {})
        self.materials = cfg.get("materials", {})
        self.cfg = cfg
        self._validate_mode()
        default_var, default_val = self._default_sweep()
        self.sweep = parse_sweep(cfg, default_var, default_val)

    # -- mode-specific validation and evaluation ---------------------------

    def _geom(self, field: str) -> float:
        return _positive(_require(self.geometry, field, "geometry"), f"geometry.{field}")

    def _validate_mode(self):
        if self.mode == "plane-plane":
            self._geom("separation_nm")
            _require(self.materials, "side1", "materials")
            _require(self.materials, "side2", "materials")
            self._side_provider("side1")
            self._side_provider("side2")
        elif self.mode == "casimir-polder":
            self._geom("separation_nm")
            self._atom_polarizability()
            surface = _require(self.materials, "surface", "materials")
            if surface != "perfect-conductor":
                _material_provider(surface, "materials.surface")
        elif self.mode == "grating":
            for f in ("separation_nm", "period_nm"):
                self._geom(f)
            _nonnegative(self.geometry.get("shift_nm", 0.0), "geometry.shift_nm")
            self._grating_profile("lower")
            self._grating_profile("upper")
        elif self.mode == "asymptotics":
            self._geom("separation_nm")
            if self.temperature_k <= 0.0:
                raise _fail("asymptotics mode needs temperature_K > 0")
            if "superconductor" in self.materials:
                self._superconductor_block()
            else:
                self._graphene_block()

    def _default_sweep(self):
        return "separation_nm", self._geom("separation_nm")

    def _side_provider(self, side: str):
        block = _require(self.materials, side, "materials")
        if block.get("kind") == "graphene-zero-mode":
            raise _fail(
                f"materials.{side}: the graphene zero-mode model is valid only for "
                "the n = 0 term; use mode 'asymptotics'"
            )
        return _material_provider(block, f"materials.{side}")

    def _atom_polarizability(self) -> Polarizability:
        atom = _require(self.materials, "atom", "materials")
        alpha0 = _positive(_require(atom, "alpha0_nm3", "materials.atom"), "materials.atom.alpha0_nm3")
        unit = atom.get("alpha_unit", "HL")
        if unit not in ("HL", "Gaussian"):
            raise _fail(f"materials.atom.alpha_unit must be 'HL' or 'Gaussian', got {unit!r}")
        # Gaussian polarizability volumes differ from Heaviside-Lorentz by 4*pi
        scale = 4.0 * math.pi if unit == "Gaussian" else 1.0
        alpha_nat = scale * units.nm3_to_natural(alpha0)
        omega0 = atom.get("omega0_eV")
        if omega0 is None:
            component = StaticPolarizability(alpha_nat)
        else:
            component = LorentzPolarizability(alpha_nat, _positive(omega0, "materials.atom.omega0_eV"))
        return Polarizability.isotropic(component)

    def _grating_profile(self, which: str, geometry: Optional[dict] = None):
        block = _require(self.materials, which, "materials")
        kind = _require(block, "kind", f"materials.{which}")
        if kind == "flat":
            return FlatProfile(build_material(_require(block, "material", f"materials.{which}"), f"materials.{which}.material"))
        if kind == "pc-sinusoid":
            depth = _positive(_require(block, "depth_nm", f"materials.{which}"), f"materials.{which}.depth_nm")
            geometry = self.geometry if geometry is None else geometry
            period = _positive(_require(geometry, "period_nm", "geometry"), "geometry.period_nm")
            return sinusoidal_profile(units.nm_to_natural(depth), units.nm_to_natural(period))
        raise _fail(f"materials.{which}: unknown profile kind '{kind}'")

    def _graphene_block(self):
        gr = self.materials.get("graphene", {})
        alpha = _positive(gr.get("alpha", 1.0 / 137.036), "materials.graphene.alpha")
        v_f = _positive(gr.get("v_F", 1.0 / 300.0), "materials.graphene.v_F")
        n_species = gr.get("N", 4)
        if not isinstance(n_species, int) or n_species < 1:
            raise _fail(f"materials.graphene.N must be a positive integer, got {n_species!r}")
        return alpha, n_species, v_f

    def _superconductor_block(self):
        sc = self.materials["superconductor"]
        m0 = _nonnegative(_require(sc, "m0_eV", "materials.superconductor"),
                          "materials.superconductor.m0_eV")
        gamma = sc.get("gamma", 0.0)
        try:
            return SuperconductorModel(float(m0), float(gamma))
        except InvalidInput as exc:
            raise _fail(f"materials.superconductor: {exc}")

    # -- evaluation ---------------------------------------------------------

    def evaluate_point(self, value: float) -> dict:
        geometry = dict(self.geometry)
        if self.sweep.variable == "temperature_K":
            t_kelvin = value
        else:
            t_kelvin = self.temperature_k
            if self.sweep.variable not in geometry and self.sweep.variable != "separation_nm":
                raise _fail(f"sweep.variable '{self.sweep.variable}' not a geometry field")
            geometry[self.sweep.variable] = value
        t_nat = units.kelvin_to_ev(t_kelvin)
        if self.mode == "plane-plane":
            return self._run_plane_plane(geometry, t_nat, value)
        if self.mode == "casimir-polder":
            return self._run_casimir_polder(geometry, value)
        if self.mode == "grating":
            return self._run_grating(geometry, t_nat, value)
        return self._run_asymptotics(geometry, t_nat, value)

    def _run_plane_plane(self, geometry, t_nat, swept) -> dict:
        a = units.nm_to_natural(_positive(geometry["separation_nm"], "geometry.separation_nm"))
        scene = PlanePlaneScene(
            self._side_provider("side1"), self._side_provider("side2"), a=a, temperature=t_nat
        )
        stats: dict = {}
        if t_nat > 0.0:
            energy = free_energy_per_area(scene, self.tol, self.max_terms, stats)
        else:
            energy = energy_per_area_T0(scene, self.tol, stats)
        press = pressure(scene, self.tol)
        return {
            "sweep_value": swept,
            "energy_si": energy * units.ENERGY_PER_AREA_SI,
            "pressure_si": press * units.PRESSURE_SI,
            "energy_natural": energy,
            "pressure_natural": press,
            "error_estimate": stats.get("error_estimate", self.tol.rel * abs(energy)),
            "j_used": 0,
            "matsubara_terms": stats.get("matsubara_terms", 0),
        }

    def _run_casimir_polder(self, geometry, swept) -> dict:
        a = units.nm_to_natural(_positive(geometry["separation_nm"], "geometry.separation_nm"))
        pol = self._atom_polarizability()
        surface_cfg = self.materials["surface"]
        if surface_cfg == "perfect-conductor":
            def energy_at(dist):
                return cp_energy_perfect_conductor(AtomScene(pol, dist), self.tol)
        else:
            provider = _material_provider(surface_cfg, "materials.surface")

            def energy_at(dist):
                return cp_energy_dielectric(AtomScene(pol, dist, provider), self.tol)

        energy = energy_at(a)
        force = -central_derivative(energy_at, a, rel_step=1e-3)
        return {
            "sweep_value": swept,
            "energy_si": energy * units.ENERGY_SI,
            "force_si": force * units.FORCE_SI,
            "energy_natural": energy,
            "force_natural": force,
            "error_estimate": self.tol.rel * abs(energy),
            "j_used": 0,
            "matsubara_terms": 0,
        }

    def _run_grating(self, geometry, t_nat, swept) -> dict:
        lower = self._grating_profile("lower", geometry)
        upper = self._grating_profile("upper", geometry)
        scene = GratingScene(
            lower,
            upper,
            separation=units.nm_to_natural(_positive(geometry["separation_nm"], "geometry.separation_nm")),
            period=units.nm_to_natural(_positive(geometry["period_nm"], "geometry.period_nm")),
            shift=units.nm_to_natural(_nonnegative(geometry.get("shift_nm", 0.0), "geometry.shift_nm")),
            temperature=t_nat,
        )
        stats: dict = {}
        if t_nat > 0.0:
            energy = grating_free_energy(scene, self.j_max, self.tol, self.max_terms, stats)
        else:
            energy = grating_energy_T0(scene, self.j_max, self.tol, stats=stats)
        return {
            "sweep_value": swept,
            "energy_si": energy * units.ENERGY_PER_AREA_SI,
            "energy_natural": energy,
            "error_estimate": self.tol.rel * abs(energy),
            "j_used": stats.get("j_used", self.j_max),
            "matsubara_terms": stats.get("matsubara_terms", 0),
        }

    def _run_asymptotics(self, geometry, t_nat, swept) -> dict:
        a = units.nm_to_natural(_positive(geometry["separation_nm"], "geometry.separation_nm"))
        ideal = asymptote_ideal_highT(a, t_nat)
        if "superconductor" in self.materials:
            # massive-photon response restores ideal-metal behavior: both
            # zero-mode polarizations tend to half the ideal asymptote
            model = self._superconductor_block()
            provider = superconductor_zero_mode_provider(model)
            f_tm_closed = f_te_closed = 0.5 * ideal
        else:
            alpha, n_species, v_f = self._graphene_block()
            f_tm_closed, f_te_closed = asymptote_graphene_metal_highT(
                a, t_nat, alpha, n_species, v_f
            )
            layer = GrapheneZeroModeModel(
                alpha=alpha, v_f=v_f, temperature=t_nat, n_species=n_species
            )
            provider = layer_provider(layer)
        scene = PlanePlaneScene(provider, ideal_provider(), a=a, temperature=t_nat)
        f_tm_num, f_te_num = zero_mode_terms(scene, self.tol)
        return {
            "sweep_value": swept,
            "f_ideal_highT_si": ideal * units.ENERGY_PER_AREA_SI,
            "f0_tm_closed_si": f_tm_closed * units.ENERGY_PER_AREA_SI,
            "f0_te_closed_si": f_te_closed * units.ENERGY_PER_AREA_SI,
            "f0_tm_numeric_si": f_tm_num * units.ENERGY_PER_AREA_SI,
            "f0_te_numeric_si": f_te_num * units.ENERGY_PER_AREA_SI,
            "f0_tm_closed_natural": f_tm_closed,
            "f0_te_closed_natural": f_te_closed,
            "f0_tm_numeric_natural": f_tm_num,
            "f0_te_numeric_natural": f_te_num,
            "error_estimate": self.tol.rel * abs(f_tm_num),
            "j_used": 0,
            "matsubara_terms": 1,
        }


_COLUMNS = {
    "plane-plane": (
        "sweep_value", "energy_si", "pressure_si", "energy_natural",
        "pressure_natural", "error_estimate", "j_used", "matsubara_terms",
    ),
    "casimir-polder": (
        "sweep_value", "energy_si", "force_si", "energy_natural",
        "force_natural", "error_estimate", "j_used", "matsubara_terms",
    ),
    "grating": (
        "sweep_value", "energy_si", "energy_natural", "error_estimate",
        "j_used", "matsubara_terms",
    ),
    "asymptotics": (
        "sweep_value", "f_ideal_highT_si", "f0_tm_closed_si", "f0_te_closed_si",
        "f0_tm_numeric_si", "f0_te_numeric_si", "f0_tm_closed_natural",
        "f0_te_closed_natural", "f0_tm_numeric_natural", "f0_te_numeric_natural",
        "error_estimate", "j_used", "matsubara_terms",
    ),
}


def _format_value(key, value) -> str:
    if key in ("j_used", "matsubara_terms"):
        return str(int(value))
    return "%.12e" % float(value)


def render_csv(mode: str, rows: list) -> str:
    columns = _COLUMNS[mode]
    out = io.StringIO()
    out.write(",".join(columns + ("status",)) + "\n")
    for row in rows:
        cells = [_format_value(c, row[c]) for c in columns]
        cells.append("ok")
        out.write(",".join(cells) + "\n")
    return out.getvalue()


def render_json(mode: str, rows: list) -> str:
    columns = _COLUMNS[mode]
    payload = {
        "schema": 1,
        "mode": mode,
        "rows": [
            {**{c: _format_value(c, row[c]) for c in columns}, "status": "ok"}
            for row in rows
        ],
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vacuumgap",
        description="Casimir / Casimir-Polder energies for flat and corrugated bodies",
    )
    parser.add_argument("--config", required=True, help="JSON scenario file")
    parser.add_argument("--output", default=None, help="output file (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--tol", type=float, default=None, help="relative tolerance override")
    parser.add_argument("--threads", type=int, default=0, help="worker pool size (0 = auto)")
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 2
    except json.JSONDecodeError as exc:
        print(f"config error: {args.config} is not valid JSON: {exc}", file=sys.stderr)
        return 2

    try:
        scenario = Scenario(cfg, tol_override=args.tol)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    n_workers = args.threads if args.threads > 0 else (os.cpu_count() or 1)
    values = scenario.sweep.values
    rows = [None] * len(values)
    try:
        if n_workers == 1 or len(values) == 1:
            for i, v in enumerate(values):
                rows[i] = scenario.evaluate_point(v)
                print(f"point {i + 1}/{len(values)} {scenario.sweep.variable}={v:g}: ok", file=sys.stderr)
        else:
            with concurrent.futures.ThreadPoolExecutor(max_workers=n_workers) as pool:
                futures = {pool.submit(scenario.evaluate_point, v): i for i, v in enumerate(values)}
                for fut in concurrent.futures.as_completed(futures):
                    i = futures[fut]
                    rows[i] = fut.result()
                    print(
                        f"point {i + 1}/{len(values)} {scenario.sweep.variable}={values[i]:g}: ok",
                        file=sys.stderr,
                    )
    except (NonConvergence, IllConditioned, ResidualTooLarge) as exc:
        failed = next((i for i, r in enumerate(rows) if r is None), 0)
        print(
            f"numerical error at point {failed + 1}/{len(values)} "
            f"({scenario.sweep.variable}={values[failed]:g}): {exc}",
            file=sys.stderr,
        )
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except VacuumGapError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3

    text = render_csv(scenario.mode, rows) if args.format == "csv" else render_json(scenario.mode, rows)
    if args.output is None:
        sys.stdout.write(text)
    else:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    return 0


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
