"""
Experiment configuration.

A configuration is either a JSON object or a key/value document::

    # comments run to the end of the line
    space = hyperbolic
    t = 20
    lambda = 0.5, 1
    paths = 100000

Keys are case-insensitive and may use ``-`` or ``_``. Unknown and repeated keys
are errors. Values are validated by ``ExperimentForm`` and every violation is
reported at once through ``ConfigError``.
"""
import difflib
import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np
from django import forms
from django.conf import settings

from . import geometry, octonion
from .exceptions import ConfigError, DomainError
from .geometry import HYPERBOLIC, PROJECTIVE, ModelSpace
from .sde import Scheme, SimConfig
from .streams import SEED_BITS

COMMANDS = ('simulate', 'charfn', 'verify', 'table')
SUITES = ('algebra', 'flat', 'flat-limit', 'projective', 'stationary', 'hyperbolic', 'skew', 'girsanov',
          'consistency', 'all')
TIME_CHANGE = 'timechange'
LINE_INTEGRAL = 'line'
ROUTES = (TIME_CHANGE, LINE_INTEGRAL)

ALIASES = {
    't_end': 't',
    'n_paths': 'paths',
    'lambda_norm': 'lambda',
    'lambda_norms': 'lambda',
}

# Keys that only change where or how fast results are produced, not the results.
UNHASHED_KEYS = ('output', 'workers', 'batch_size')

DEFAULT_PATHS = 1000


class FloatListField(forms.CharField):
    """Comma separated floats; also accepts a list (from JSON)."""

    def __init__(self, length=None, **kwargs):
        self.length = length
        super(FloatListField, self).__init__(**kwargs)

    def to_python(self, value):
        if isinstance(value, (list, tuple)):
            items = list(value)
        else:
            value = super(FloatListField, self).to_python(value)
            if not value:
                return []
            items = [item for item in value.split(',') if item.strip()]
        try:
            values = [float(item) for item in items]
        except (TypeError, ValueError):
            raise forms.ValidationError("expected a comma separated list of numbers")
        if not all(np.isfinite(values)):
            raise forms.ValidationError("values must be finite")
        if self.length is not None and len(values) != self.length:
            raise forms.ValidationError("expected %d numbers, got %d" % (self.length, len(values)))
        return values


class ChoiceOrNoneField(forms.ChoiceField):
    def __init__(self, choices, **kwargs):
        kwargs.setdefault('required', False)
        super(ChoiceOrNoneField, self).__init__(choices=[(c, c) for c in choices], **kwargs)

    def to_python(self, value):
        value = super(ChoiceOrNoneField, self).to_python(value)
        return value.lower() if value else value


class ExperimentForm(forms.Form):
    command = ChoiceOrNoneField(COMMANDS)
    space = ChoiceOrNoneField([s.value for s in ModelSpace])
    t = forms.FloatField(required=False)
    t_grid = FloatListField(required=False)
    dt = forms.FloatField(required=False)
    paths = forms.IntegerField(required=False, min_value=1)
    r0 = forms.FloatField(required=False)
    w0 = FloatListField(length=octonion.DIM, required=False)
    # "lambda" is a keyword; the field is renamed in __init__.
    lambda_ = FloatListField(required=False)
    seed = forms.IntegerField(required=False, min_value=0, max_value=2 ** SEED_BITS - 1)
    scheme = forms.CharField(required=False)
    route = ChoiceOrNoneField(ROUTES)
    exact_besq = forms.NullBooleanField(required=False)
    grid_points = forms.IntegerField(required=False, min_value=2)
    suite = ChoiceOrNoneField(SUITES)
    keep_paths = forms.IntegerField(required=False, min_value=0)
    coarsen = forms.IntegerField(required=False, min_value=1)
    output = forms.CharField(required=False)
    workers = forms.IntegerField(required=False, min_value=1)
    batch_size = forms.IntegerField(required=False, min_value=1)

    def __init__(self, *args, **kwargs):
        super(ExperimentForm, self).__init__(*args, **kwargs)
        self.fields['lambda'] = self.fields.pop('lambda_')

    @classmethod
    def known_keys(cls):
        return sorted(k.rstrip('_') for k in cls.base_fields)

    def clean_scheme(self):
        scheme = self.cleaned_data.get('scheme')
        if not scheme:
            return None
        try:
            return Scheme.coerce(scheme)
        except DomainError as e:
            raise forms.ValidationError(str(e))

    def clean(self):
        data = super(ExperimentForm, self).clean()
        command = data.get('command') or 'charfn'
        data['command'] = command
        if not data.get('space') and command in ('simulate', 'charfn', 'table'):
            self.add_error('space', "is required for the %s command" % command)
        space = ModelSpace.coerce(data['space']) if data.get('space') else None

        t = data.get('t')
        if t is not None and not t > 0:
            self.add_error('t', "must be > 0, got %r" % t)
        for value in data.get('t_grid') or []:
            if not value > 1:
                self.add_error('t_grid', "times must be > 1 for the logarithmic scaling, got %r" % value)
                break
        dt = data.get('dt')
        if dt is not None and not dt > 0:
            self.add_error('dt', "must be > 0, got %r" % dt)
        elif dt is not None and t is not None and dt > t:
            self.add_error('dt', "must not exceed t (%r > %r)" % (dt, t))
        if command in ('simulate', 'charfn') and t is None:
            self.add_error('t', "is required for the %s command" % command)
        for value in data.get('lambda') or []:
            if value < 0:
                self.add_error('lambda', "norms must be >= 0, got %r" % value)
                break

        r0 = data.get('r0')
        w0 = data.get('w0')
        if space is not None and r0 is not None:
            if not 0 < r0 < space.radial_upper:
                bound = "pi/2" if space is PROJECTIVE else "infinity"
                self.add_error('r0', "must lie in (0, %s) for the %s space, got %r" % (bound, space, r0))
        if space is not None and w0:
            w_norm = float(np.sqrt(np.dot(w0, w0)))
            if w_norm == 0:
                self.add_error('w0', "must not be the origin")
            elif space is HYPERBOLIC and not w_norm < 1:
                self.add_error('w0', "lies outside the hyperbolic chart: |w0| = %g but the chart is |w| < 1"
                               % w_norm)
            elif r0 is not None and not np.isclose(float(geometry.coord_radius(space, w_norm)), r0):
                self.add_error('w0', "disagrees with r0=%r" % r0)
        if data.get('exact_besq') and space is not None and space is not geometry.FLAT:
            self.add_error('exact_besq', "exact BESQ transitions exist only for the flat space")
        if command == 'verify' and not data.get('suite'):
            data['suite'] = 'all'
        return data


def normalize_key(key):
    key = str(key).strip().lower().replace('-', '_')
    return ALIASES.get(key, key)


def read_config_text(text):
    """Parse a config document into raw values (still unvalidated)."""
    if isinstance(text, bytes):
        text = text.decode('utf-8')
    violations = []
    if text.lstrip().startswith('{'):
        def pairs_hook(pairs):
            seen = {}
            for key, value in pairs:
                norm = normalize_key(key)
                if norm in seen:
                    violations.append("duplicate key %r" % key)
                seen[norm] = value
            return seen
        try:
            raw = json.loads(text, object_pairs_hook=pairs_hook)
        except ValueError as e:
            raise ConfigError(["invalid JSON: %s" % e])
    else:
        raw = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                violations.append("line %d: expected 'key = value'" % lineno)
                continue
            key, value = (part.strip() for part in line.split('=', 1))
            norm = normalize_key(key)
            if not norm:
                violations.append("line %d: empty key" % lineno)
            elif norm in raw:
                violations.append("line %d: duplicate key %r" % (lineno, key))
            else:
                raw[norm] = value
    if violations:
        raise ConfigError(violations)
    return raw


@dataclass(frozen=True)
class ExperimentConfig:
    command: str
    space: str
    t_end: float
    t_grid: tuple
    dt: float
    n_paths: int
    r0: float
    w0: tuple
    lambda_norms: tuple
    seed: int
    scheme: str
    route: str
    exact_besq: bool
    grid_points: int
    suite: str
    keep_paths: int
    coarsen: int
    output: str
    workers: int
    batch_size: int

    @property
    def paths(self):
        return self.n_paths or DEFAULT_PATHS

    @property
    def model_space(self):
        return ModelSpace.coerce(self.space) if self.space else None

    def to_dict(self):
        return asdict(self)

    def canonical_json(self):
        data = {k: v for k, v in self.to_dict().items() if k not in UNHASHED_KEYS}
        return json.dumps(data, sort_keys=True, separators=(',', ':'))

    @property
    def config_hash(self):
        return hashlib.sha256(self.canonical_json().encode('utf-8')).hexdigest()

    def sim_config(self, **changes):
        """The engine configuration for this experiment; ``changes`` override fields."""
        space = ModelSpace.coerce(changes.pop('space', self.space))
        r_max = {PROJECTIVE: settings.WINDING_PROJECTIVE_R_MAX,
                 HYPERBOLIC: settings.WINDING_HYPERBOLIC_R_MAX}.get(space)
        params = dict(space=space, t_end=self.t_end, dt=self.dt, r0=None if self.w0 else self.r0,
                      w0=self.w0, scheme=self.scheme, seed=self.seed, r_min=settings.WINDING_R_MIN,
                      r_max=r_max, exact_besq=self.exact_besq, grid_points=self.grid_points)
        if 'r0' in changes:
            params['w0'] = None
        params.update(changes)
        return SimConfig(**params)


def validate_config(raw):
    """Validate raw values into an ExperimentConfig or raise ConfigError."""
    raw = {normalize_key(k): v for k, v in raw.items() if v is not None}
    known = set(ExperimentForm.known_keys())
    violations = []
    for key in sorted(set(raw) - known):
        hint = difflib.get_close_matches(key, known, n=1)
        violations.append("unknown key %r%s" % (key, " (did you mean %r?)" % hint[0] if hint else ""))

    data = {}
    for key, value in raw.items():
        if key in known:
            if isinstance(value, bool):
                value = 'true' if value else 'false'
            data[key] = value
    form = ExperimentForm(data=data)
    if not form.is_valid():
        for field, errors in sorted(form.errors.items()):
            for error in errors:
                violations.append(error if field == '__all__' else "%s: %s" % (field, error))
    if violations:
        raise ConfigError(violations)

    cleaned = form.cleaned_data
    r0 = cleaned.get('r0')
    w0 = cleaned.get('w0') or None
    if w0 is not None and cleaned.get('space'):
        r0 = float(geometry.coord_radius(cleaned['space'], np.sqrt(np.dot(w0, w0))))
    scheme = cleaned.get('scheme') or Scheme.coerce(settings.WINDING_DEFAULT_SCHEME)
    t_end = cleaned.get('t')
    return ExperimentConfig(
        command=cleaned['command'],
        space=cleaned.get('space') or '',
        t_end=t_end if t_end is not None else 1.0,
        t_grid=tuple(cleaned.get('t_grid') or (1e3, 1e5, 1e8)),
        dt=cleaned.get('dt') or settings.WINDING_DEFAULT_DT,
        n_paths=cleaned.get('paths'),
        r0=r0 if r0 is not None else 1.0,
        w0=tuple(w0) if w0 is not None else None,
        lambda_norms=tuple(cleaned.get('lambda') or (1.0,)),
        seed=cleaned['seed'] if cleaned.get('seed') is not None else settings.WINDING_DEFAULT_SEED,
        scheme=str(scheme),
        route=cleaned.get('route') or TIME_CHANGE,
        exact_besq=bool(cleaned.get('exact_besq')),
        grid_points=cleaned.get('grid_points') or 4000,
        suite=cleaned.get('suite') or '',
        keep_paths=cleaned.get('keep_paths') or 0,
        coarsen=cleaned.get('coarsen') or 1,
        output=cleaned.get('output') or '',
        workers=cleaned.get('workers') or settings.WINDING_WORKERS,
        batch_size=cleaned.get('batch_size') or settings.WINDING_BATCH_SIZE,
    )


def parse_config(text, overrides=None):
    """Parse and validate a config document; ``overrides`` (e.g. CLI flags) win."""
    raw = read_config_text(text) if text else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            raw[normalize_key(key)] = value
    return validate_config(raw)
