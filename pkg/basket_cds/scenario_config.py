"""
Scenario configuration: TOML documents with [model], [contract], [run], [mc],
[quadrature] and [output] tables
"""
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from basket_cds.decay_density import DecaySpec
from basket_cds.errors import BasketCDSError, ConfigError
from basket_cds.hetero_groups import TwoGroupSpec
from basket_cds.laws import ModelSpec
from basket_cds.mixture_core import HomogeneousSpec
from basket_cds.montecarlo import GeneralIntensitySpec, SimulationPlan
from basket_cds.pricing import SwapContract
from basket_cds.quadrature import QuadratureConfig
from basket_cds.regime_switch import TwoStateSpec

logger = logging.getLogger(__name__)

MODEL_TYPES = ('homogeneous', 'decay', 'regime_switching', 'two_group', 'general_mc')
METHODS = ('analytic', 'mc', 'both')
OUTPUT_FORMATS = ('csv', 'xlsx')

# required [model] keys per model type
MODEL_FIELDS = {
    'homogeneous': ('n', 'a', 'c'),
    'decay': ('n', 'a', 'c', 'd'),
    'regime_switching': ('n', 'c', 'x1', 'x2', 'eta1', 'eta2', 'initial_state'),
    'two_group': ('n1', 'n2', 'a', 'a_tilde', 'b', 'c', 'b_tilde', 'c_tilde'),
    'general_mc': ('a', 'b', 'd'),
}

DEFAULT_PATHS = 100_000


@dataclass(frozen=True)
class ScenarioConfig:
    """
    A validated scenario.

    Args:
        name: Label used in result rows
        model_type: One of MODEL_TYPES
        model: The model spec built from [model]
        contract: Swap terms built from [contract]
        ks: Seniorities to price
        method: analytic, mc or both
        mc_plan: Simulation plan (None when no [mc] table and method is analytic)
        quadrature: Tolerances for numeric integrals
        output_path: Where results go (None: stdout)
        output_format: csv or xlsx
    """
    name: str
    model_type: str
    model: ModelSpec
    contract: SwapContract
    ks: Tuple[int, ...]
    method: str = 'analytic'
    mc_plan: Optional[SimulationPlan] = None
    quadrature: QuadratureConfig = QuadratureConfig()
    output_path: Optional[str] = None
    output_format: str = 'csv'

    @property
    def n_total(self) -> int:
        return self.model.n

    def with_model(self, model: ModelSpec) -> 'ScenarioConfig':
        return replace(self, model=model)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _table(data: Dict, key: str, errors: List[str], required: bool = True) -> Dict:
    value = data.get(key)
    if value is None:
        if required:
            errors.append(f"{key}: missing table")
        return {}
    if not isinstance(value, dict):
        errors.append(f"{key}: must be a table")
        return {}
    return value


def _build(errors: List[str], path: str, factory, **kwargs):
    """Run a constructor, turning its validation errors into field-path messages."""
    try:
        return factory(**kwargs)
    except (BasketCDSError, ValueError, TypeError) as e:
        errors.append(f"{path}: {e}")
        return None


def _parse_model(block: Dict, errors: List[str]) -> Tuple[Optional[str], Optional[ModelSpec]]:
    model_type = block.get('type')
    if model_type not in MODEL_TYPES:
        errors.append(f"model.type: must be one of {', '.join(MODEL_TYPES)}, got {model_type!r}")
        return None, None
    fields = MODEL_FIELDS[model_type]
    missing = [f for f in fields if f not in block]
    for name in missing:
        errors.append(f"model.{name}: required for model type {model_type!r}")
    unknown = sorted(set(block) - set(fields) - {'type'})
    for name in unknown:
        errors.append(f"model.{name}: unknown key for model type {model_type!r}")
    if missing:
        return model_type, None
    if model_type != 'general_mc':
        bad = [f for f in fields if not _is_number(block[f])]
        for name in bad:
            errors.append(f"model.{name}: must be a number, got {block[name]!r}")
        if bad:
            return model_type, None

    params = {f: block[f] for f in fields}
    factories = {
        'homogeneous': HomogeneousSpec,
        'decay': DecaySpec,
        'regime_switching': TwoStateSpec,
        'two_group': TwoGroupSpec,
        'general_mc': GeneralIntensitySpec,
    }
    return model_type, _build(errors, 'model', factories[model_type], **params)


def _parse_contract(block: Dict, errors: List[str]) -> Optional[SwapContract]:
    if not block:
        return None
    problems = []
    for name in ('recovery', 'rate'):
        if not _is_number(block.get(name)):
            problems.append(f"contract.{name}: must be a number, got {block.get(name)!r}")
    if 'payment_times' in block:
        times = block['payment_times']
        if not isinstance(times, list) or not all(_is_number(t) for t in times):
            problems.append('contract.payment_times: must be a list of numbers')
        errors.extend(problems)
        if problems:
            return None
        return _build(errors, 'contract', SwapContract, payment_times=tuple(times),
                      recovery=block['recovery'], rate=block['rate'])
    for name in ('maturity', 'period'):
        if not _is_number(block.get(name)):
            problems.append(f"contract.{name}: must be a number (or give payment_times), got {block.get(name)!r}")
    errors.extend(problems)
    if problems:
        return None
    return _build(errors, 'contract', SwapContract.regular, maturity=block['maturity'],
                  period=block['period'], recovery=block['recovery'], rate=block['rate'])


def _parse_plan(block: Dict, errors: List[str]) -> Optional[SimulationPlan]:
    if not block:
        return None
    kwargs = {
        'paths': block.get('paths', DEFAULT_PATHS),
        'seed': block.get('seed', 0),
        'parallel_chunks': block.get('parallel_chunks', 1),
        'antithetic': block.get('antithetic', False),
    }
    for name in ('paths', 'seed', 'parallel_chunks'):
        if isinstance(kwargs[name], bool) or not isinstance(kwargs[name], int):
            errors.append(f"mc.{name}: must be an integer, got {kwargs[name]!r}")
            return None
    return _build(errors, 'mc', SimulationPlan, **kwargs)


def validate_scenario(data: Dict) -> Tuple[bool, List[str]]:
    """
    Check a raw scenario document without raising.

    Returns:
        Tuple of (is_valid, errors_list)
    """
    try:
        parse_scenario(data)
    except ConfigError as e:
        return False, e.errors
    return True, []


def parse_scenario(data: Dict, name: str = 'scenario') -> ScenarioConfig:
    """
    Build a ScenarioConfig from a parsed TOML document.

    Raises:
        ConfigError: listing every problem found, each prefixed with its field path
    """
    errors: List[str] = []
    if not isinstance(data, dict):
        raise ConfigError(['document must be a TOML table'])
    unknown = sorted(set(data) - {'name', 'model', 'contract', 'run', 'mc', 'quadrature', 'output'})
    for key in unknown:
        errors.append(f"{key}: unknown table")

    model_type, model = _parse_model(_table(data, 'model', errors), errors)
    contract = _parse_contract(_table(data, 'contract', errors), errors)
    run = _table(data, 'run', errors)
    plan = _parse_plan(_table(data, 'mc', errors, required=False), errors)

    quad_block = _table(data, 'quadrature', errors, required=False)
    quadrature = _build(errors, 'quadrature', QuadratureConfig, **quad_block) if quad_block else QuadratureConfig()

    method = run.get('method', 'analytic')
    if method not in METHODS:
        errors.append(f"run.method: must be one of {', '.join(METHODS)}, got {method!r}")
    elif model_type == 'general_mc' and method != 'mc':
        errors.append("run.method: general_mc models are simulated only; use 'mc'")
    elif method in ('mc', 'both') and plan is None and 'mc' not in data:
        plan = SimulationPlan(paths=DEFAULT_PATHS)

    ks = run.get('ks')
    if ks is None:
        # a missing or malformed [run] table is already reported
        if isinstance(data.get('run'), dict):
            errors.append('run.ks: required')
    elif ks is not None:
        if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and not isinstance(k, bool) for k in ks):
            errors.append(f"run.ks: must be a non-empty list of integers, got {ks!r}")
        else:
            if len(set(ks)) != len(ks):
                errors.append('run.ks: duplicate seniorities')
            for k in ks:
                if k < 1:
                    errors.append(f"run.ks: seniority {k} must be >= 1")
                elif model is not None and k > model.n:
                    errors.append(f"run.ks: seniority {k} exceeds basket size {model.n}")

    output = _table(data, 'output', errors, required=False)
    output_format = output.get('format', 'csv')
    if output_format not in OUTPUT_FORMATS:
        errors.append(f"output.format: must be one of {', '.join(OUTPUT_FORMATS)}, got {output_format!r}")
    output_path = output.get('path')
    if output_path is not None and not isinstance(output_path, str):
        errors.append('output.path: must be a string')

    scenario_name = data.get('name', name)
    if not isinstance(scenario_name, str):
        errors.append('name: must be a string')

    if errors:
        raise ConfigError(errors)
    return ScenarioConfig(
        name=scenario_name,
        model_type=model_type,
        model=model,
        contract=contract,
        ks=tuple(sorted(ks)),
        method=method,
        mc_plan=plan,
        quadrature=quadrature,
        output_path=output_path,
        output_format=output_format,
    )


def apply_overrides(data: Dict, method: Optional[str] = None, paths: Optional[int] = None,
                    seed: Optional[int] = None, chunks: Optional[int] = None,
                    out: Optional[str] = None) -> Dict:
    """Copy of a raw document with command-line values written over it."""
    merged = {key: dict(value) if isinstance(value, dict) else value for key, value in data.items()}
    if method is not None:
        merged.setdefault('run', {})['method'] = method
    mc = {}
    if paths is not None:
        mc['paths'] = paths
    if seed is not None:
        mc['seed'] = seed
    if chunks is not None:
        mc['parallel_chunks'] = chunks
    if mc:
        merged.setdefault('mc', {}).update(mc)
    if out is not None:
        block = merged.setdefault('output', {})
        block['path'] = out
        if out.lower().endswith('.xlsx'):
            block['format'] = 'xlsx'
    return merged


def read_scenario_document(source: Union[str, Path, bytes]) -> Dict:
    """Parse TOML from a path or raw bytes (Streamlit uploads)."""
    try:
        if isinstance(source, bytes):
            return tomllib.loads(source.decode('utf-8'))
        with open(source, 'rb') as f:
            return tomllib.load(f)
    except tomllib.TOMLDecodeError as e:
        raise ConfigError([f"toml: {e}"]) from e
    except UnicodeDecodeError as e:
        raise ConfigError([f"toml: not UTF-8 text ({e})"]) from e
    except OSError as e:
        raise ConfigError([f"config: cannot read {source} ({e.strerror})"]) from e


def load_scenario(path: Union[str, Path], **overrides) -> ScenarioConfig:
    """Read, override and validate a scenario file."""
    data = read_scenario_document(path)
    data = apply_overrides(data, **overrides)
    config = parse_scenario(data, name=Path(path).stem)
    logger.debug("loaded scenario %s (%s, ks=%s, method=%s)",
                 config.name, config.model_type, list(config.ks), config.method)
    return config
