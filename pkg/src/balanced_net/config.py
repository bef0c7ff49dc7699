"""Plain-text parameter files and the shipped experiment presets.

Format: one ``key = value`` pair per line, ``#`` comments.  Keys are the
channel-suffixed coupling constants (C_ee, ...), time constants, the
per-population size n, and tanh-affine rate parameters f_<ch>.{a,b,c}.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Union

from .model import CHANNELS, NetworkParams, TanhAffine

_SCALAR_KEYS = ("tau_e", "tau_i")
_RATE_FIELDS = ("a", "b", "c")

#: experiment presets: name -> (k_e, k_i) initial variances
EXPERIMENTS = {
    "sec6_ke1_ki1": (1.0, 1.0),
    "sec6_ke1_ki05": (1.0, 0.5),
}


def parse_params(text: str) -> NetworkParams:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in values:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        values[key] = val

    expected = {f"C_{ch}" for ch in CHANNELS}
    expected.update(_SCALAR_KEYS)
    expected.add("n")
    expected.update(f"f_{ch}.{fld}" for ch in CHANNELS for fld in _RATE_FIELDS)
    missing = expected - values.keys()
    if missing:
        raise ValueError(f"missing keys: {sorted(missing)}")
    unknown = values.keys() - expected
    if unknown:
        raise ValueError(f"unknown keys: {sorted(unknown)}")

    rates = {
        ch: TanhAffine(
            scale=float(values[f"f_{ch}.a"]),
            offset=float(values[f"f_{ch}.b"]),
            gain=float(values[f"f_{ch}.c"]),
        )
        for ch in CHANNELS
    }
    return NetworkParams(
        c_ee=float(values["C_ee"]),
        c_ei=float(values["C_ei"]),
        c_ie=float(values["C_ie"]),
        c_ii=float(values["C_ii"]),
        tau_e=float(values["tau_e"]),
        tau_i=float(values["tau_i"]),
        n=int(values["n"]),
        f_ee=rates["ee"],
        f_ei=rates["ei"],
        f_ie=rates["ie"],
        f_ii=rates["ii"],
    )


def write_params(p: NetworkParams) -> str:
    """Serialize parameters; only tanh-affine rates round-trip."""
    lines = []
    for ch in CHANNELS:
        lines.append(f"C_{ch} = {p.coupling(ch)!r}")
    lines.append(f"tau_e = {p.tau_e!r}")
    lines.append(f"tau_i = {p.tau_i!r}")
    lines.append(f"n = {p.n}")
    for ch in CHANNELS:
        f = p.rate(ch)
        if not isinstance(f, TanhAffine):
            raise TypeError(f"channel {ch}: only tanh-affine rates serialize")
        lines.append(f"f_{ch}.a = {f.scale!r}")
        lines.append(f"f_{ch}.b = {f.offset!r}")
        lines.append(f"f_{ch}.c = {f.gain!r}")
    return "\n".join(lines) + "\n"


def load_params(path: Union[str, Path]) -> NetworkParams:
    return parse_params(Path(path).read_text())


def paper_preset_text() -> str:
    return resources.files("balanced_net.presets").joinpath("paper_sec6.cfg").read_text()


def paper_params() -> NetworkParams:
    """The shipped simulation-section parameter set (n = 5000 per population)."""
    return parse_params(paper_preset_text())
