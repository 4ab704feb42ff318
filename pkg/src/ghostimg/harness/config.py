"""Line-oriented ``key = value`` scenario files.

Example::

    # double slit, n = N/2
    scenario_id = double_slit_1d
    frames = 20000
    orders = 2:1, 4:2, 6:3, 8:4, 10:5
    slit_width = 150um, slit_sep = 570um

Several assignments may share a line when separated by commas; a comma
followed by text without ``=`` continues the previous value as a list.
Lengths take ``nm``, ``um`` (or ``µm``), ``mm``, ``cm`` or ``m`` suffixes;
a bare number is metres.
"""

from dataclasses import dataclass, field, replace
import re

from ..core import CorrelationOrder, OpticalConfig
from ..detect import DetectorModel
from ..errors import BadUnit, ConfigError, MissingRequired, RangeError, UnknownKey

SCENARIOS = ("character2d", "order_sweep_2d", "fourth_order_n_sweep", "double_slit_1d",
             "direct_image", "nfactorial_check")
MIN_FRAMES = 100

_UNITS = {"nm": 1e-9, "um": 1e-6, "µm": 1e-6, "μm": 1e-6, "mm": 1e-3, "cm": 1e-2, "m": 1.0}
_LENGTH_RE = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([^\d\s]*)\s*$")

# Geometry and order presets per scenario; any key in a file overrides these.
PRESETS = {
    "character2d": dict(wavelength=532e-9, source_diameter=3e-3, z1=0.24, nx=256, ny=256,
                        pixels_per_coherence=4, mask="glyph",
                        orders=[(2, 1), (10, 9), (20, 19)]),
    "order_sweep_2d": dict(wavelength=532e-9, source_diameter=3e-3, z1=0.24, nx=64, ny=64,
                           pixels_per_coherence=4, mask="glyph", orders=[(2, 1), (10, 9)]),
    "fourth_order_n_sweep": dict(wavelength=532e-9, source_diameter=3e-3, z1=0.24, nx=64,
                                 ny=64, pixels_per_coherence=4, mask="glyph",
                                 orders=[(4, 1), (4, 2), (4, 3)]),
    "double_slit_1d": dict(wavelength=441.6e-9, source_diameter=1e-3, z1=0.354, nx=4096, ny=1,
                           pitch=10e-6, mask="double_slit",
                           orders=[(2, 1), (4, 2), (6, 3), (8, 4), (10, 5)]),
    "direct_image": dict(wavelength=532e-9, source_diameter=3e-3, z1=0.24, nx=128, ny=128,
                         pixels_per_coherence=3, mask="glyph", glyph_size=0.5,
                         z3_list=(0.0, 1e-3, 36e-3), orders=[(2, 1)]),
    "nfactorial_check": dict(wavelength=532e-9, source_diameter=3e-3, z1=0.24, nx=256,
                             ny=256, pixels_per_coherence=4, mask="none", orders=[(2, 1)]),
}

_LENGTH_KEYS = {"wavelength", "source_diameter", "z1", "z2", "z3", "pitch", "slit_width",
                "slit_sep", "slit_height", "rect_width"}
_LENGTH_LIST_KEYS = {"z3_list"}
_INT_KEYS = {"frames", "nx", "ny", "seed", "blocks", "threads", "quant_bits", "max_order",
             "sample_stride"}
_FLOAT_KEYS = {"mean_intensity", "pixels_per_coherence", "read_noise", "gain",
               "glyph_size", "glyph_stroke"}
_BOOL_KEYS = {"bit_exact", "shot_noise"}
_STR_KEYS = {"scenario_id", "mask", "output_dir"}
_KNOWN = (_LENGTH_KEYS | _LENGTH_LIST_KEYS | _INT_KEYS | _FLOAT_KEYS | _BOOL_KEYS | _STR_KEYS
          | {"orders"})


@dataclass(frozen=True)
class ScenarioSpec:
    scenario_id: str
    frames: int
    orders: tuple
    config: OpticalConfig
    mask_source: str = "builtin"
    output_dir: str = "out"
    slit_width: float = 150e-6
    slit_sep: float = 570e-6
    slit_height: float = None
    rect_width: float = None
    glyph_size: float = 0.8
    glyph_stroke: float = 0.085
    z3_list: tuple = ()
    blocks: int = 10
    threads: int = 1
    bit_exact: bool = False
    max_order: int = 4
    sample_stride: int = 0
    detector: DetectorModel = field(default_factory=DetectorModel)

    def __post_init__(self):
        if self.scenario_id not in SCENARIOS:
            raise RangeError(f"unknown scenario_id {self.scenario_id!r}; one of {SCENARIOS}")
        if self.frames < MIN_FRAMES:
            raise RangeError(f"frames must be >= {MIN_FRAMES}, got {self.frames}")
        if not self.orders:
            raise RangeError("at least one correlation order is required")
        if self.blocks < 0 or self.blocks == 1:
            raise RangeError("blocks must be 0 (off) or >= 2")

    def replace(self, **changes):
        return replace(self, **changes)


def parse_length(text):
    m = _LENGTH_RE.match(text)
    if not m:
        raise BadUnit(f"cannot parse length {text!r}")
    value, unit = m.groups()
    unit = unit or "m"
    if unit not in _UNITS:
        raise BadUnit(f"unknown length unit {unit!r} in {text!r}")
    return float(value) * _UNITS[unit]


def parse_orders(items):
    out = []
    for item in items:
        parts = re.split(r"[:/]", item.strip())
        if len(parts) != 2:
            raise ConfigError(f"order must look like N:n, got {item!r}")
        try:
            out.append(CorrelationOrder(int(parts[0]), int(parts[1])))
        except ValueError as exc:
            raise ConfigError(f"bad order {item!r}: {exc}") from exc
    return tuple(out)


def _parse_bool(text):
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _split_assignments(text):
    """Map of key -> list of raw value items, in file order."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        current = None
        for seg in line.split(","):
            if "=" in seg:
                key, value = seg.split("=", 1)
                key = key.strip()
                if key not in _KNOWN:
                    raise UnknownKey(f"line {lineno}: unknown key {key!r}")
                if key in raw:
                    raise ConfigError(f"line {lineno}: duplicate key {key!r}")
                raw[key] = [value.strip()]
                current = key
            elif current is None:
                raise ConfigError(f"line {lineno}: expected key = value, got {seg.strip()!r}")
            else:
                raw[current].append(seg.strip())
    return raw


def _scalar(key, items):
    if len(items) != 1:
        raise ConfigError(f"{key} takes a single value, got {items!r}")
    return items[0]


def parse_config(text):
    """Parse scenario text into a validated :class:`ScenarioSpec`.

    Raises
    ------
    UnknownKey, BadUnit, MissingRequired, RangeError, ConfigError
    """
    raw = _split_assignments(text)
    for key in ("scenario_id", "frames"):
        if key not in raw:
            raise MissingRequired(f"missing required key {key!r}")
    values = {}
    for key, items in raw.items():
        try:
            if key in _LENGTH_KEYS:
                values[key] = parse_length(_scalar(key, items))
            elif key in _LENGTH_LIST_KEYS:
                values[key] = tuple(parse_length(i) for i in items)
            elif key in _INT_KEYS:
                values[key] = int(_scalar(key, items))
            elif key in _FLOAT_KEYS:
                values[key] = float(_scalar(key, items))
            elif key in _BOOL_KEYS:
                values[key] = _parse_bool(_scalar(key, items))
            elif key == "orders":
                values[key] = parse_orders(items)
            else:
                values[key] = _scalar(key, items)
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {items!r}") from exc
    scenario = values["scenario_id"]
    if scenario not in PRESETS:
        raise RangeError(f"unknown scenario_id {scenario!r}; one of {SCENARIOS}")
    if values["frames"] < MIN_FRAMES:
        raise RangeError(f"frames must be >= {MIN_FRAMES}, got {values['frames']}")
    return build_spec(scenario, values)


def build_spec(scenario, values):
    """Merge `values` over the scenario preset and build the scenario."""
    merged = dict(PRESETS[scenario])
    merged.update(values)
    lc = merged["wavelength"] * merged["z1"] / merged["source_diameter"]
    pitch = merged.get("pitch") or lc / merged.get("pixels_per_coherence", 4)
    cfg = OpticalConfig(
        wavelength=merged["wavelength"], source_diameter=merged["source_diameter"],
        z1=merged["z1"], z2=merged.get("z2", merged["z1"]), z3=merged.get("z3", 0.0),
        pitch=pitch, nx=merged["nx"], ny=merged["ny"],
        mean_intensity=merged.get("mean_intensity", 1.0), seed=merged.get("seed", 0))
    orders = merged["orders"]
    orders = tuple(o if isinstance(o, CorrelationOrder) else CorrelationOrder(*o) for o in orders)
    detector = DetectorModel(shot_noise=merged.get("shot_noise", False),
                             read_noise_sigma=merged.get("read_noise", 0.0),
                             quant_bits=merged.get("quant_bits", 0),
                             exposure_gain=merged.get("gain", 1.0))
    extra = {k: merged[k] for k in ("slit_width", "slit_sep", "slit_height", "rect_width",
                                    "glyph_size", "glyph_stroke", "blocks", "threads",
                                    "bit_exact", "max_order", "sample_stride") if k in merged}
    return ScenarioSpec(scenario_id=scenario, frames=merged["frames"], orders=orders, config=cfg,
                        mask_source=merged.get("mask", "builtin"),
                        output_dir=merged.get("output_dir", "out"),
                        z3_list=tuple(merged.get("z3_list", ())), detector=detector, **extra)
