from math import prod

from rest_framework import serializers

from .scenario import ANALYSIS_KINDS

SPIN_KEYWORDS = {'sigma_x': 'x', 'sigma_y': 'y', 'sigma_z': 'z'}


# -------------------------
# Numbers
# -------------------------
class ComplexField(serializers.Field):
    default_error_messages = {
        'invalid': 'Expected a complex number as a [re, im] pair.',
    }

    def to_internal_value(self, data):
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, (int, float)):
            return complex(float(data), 0.0)
        if (isinstance(data, (list, tuple)) and len(data) == 2
                and all(isinstance(part, (int, float)) and not isinstance(part, bool) for part in data)):
            return complex(float(data[0]), float(data[1]))
        self.fail('invalid')

    def to_representation(self, value):
        value = complex(value)
        return [value.real, value.imag]


class AmplitudeListField(serializers.ListField):
    child = ComplexField()


class MatrixField(serializers.ListField):
    child = AmplitudeListField(allow_empty=False)

    def __init__(self, **kwargs):
        kwargs.setdefault('allow_empty', False)
        super().__init__(**kwargs)


# -------------------------
# Observables
# -------------------------
class BranchSerializer(serializers.Serializer):
    label = serializers.CharField()
    eigenvalue = serializers.FloatField()
    projector = MatrixField()


class ExplicitObservableSerializer(serializers.Serializer):
    name = serializers.CharField(required=False, allow_blank=True)
    targets = serializers.ListField(child=serializers.IntegerField(min_value=0), required=False)
    branches = BranchSerializer(many=True, allow_empty=False)


class ObservableField(serializers.Field):
    """Either a keyword (sigma_x, sigma_y, sigma_z) or {"branches": [...]}."""

    default_error_messages = {
        'invalid': 'Expected a keyword or an object with "branches".',
        'unknown_keyword': 'Unknown observable keyword "{keyword}"; use one of {choices}.',
    }

    def to_internal_value(self, data):
        if isinstance(data, str):
            if data not in SPIN_KEYWORDS:
                self.fail('unknown_keyword', keyword=data, choices=sorted(SPIN_KEYWORDS))
            return {'keyword': data}
        if isinstance(data, dict):
            serializer = ExplicitObservableSerializer(data=data)
            if not serializer.is_valid():
                raise serializers.ValidationError(serializer.errors)
            return dict(serializer.validated_data)
        self.fail('invalid')

    def to_representation(self, value):
        return value


class EventSerializer(serializers.Serializer):
    id = serializers.CharField()
    target = serializers.IntegerField(min_value=0, required=False)
    observable = ObservableField()
    forced_outcome = serializers.CharField(required=False, allow_null=True)

    def validate(self, attrs):
        if 'keyword' in attrs['observable'] and 'target' not in attrs:
            raise serializers.ValidationError({'target': 'A keyword observable needs a target subsystem.'})
        return attrs


# -------------------------
# Analysis requests
# -------------------------
class CompareOrderingsSerializer(serializers.Serializer):
    orderings = serializers.ListField(
        child=serializers.ListField(child=serializers.CharField(), allow_empty=False), min_length=2)


class ObservableRequestSerializer(serializers.Serializer):
    observable = serializers.CharField()


class CheckRulesSerializer(serializers.Serializer):
    a = serializers.CharField()
    b = serializers.CharField()


class WeakValueSerializer(serializers.Serializer):
    operator = serializers.CharField()


class WeakMcSerializer(serializers.Serializer):
    operator = serializers.CharField()
    g = serializers.FloatField()
    delta = serializers.FloatField()
    post_samples = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=2 ** 64 - 1)
    grid_points = serializers.IntegerField(min_value=2, required=False)
    shards = serializers.IntegerField(min_value=1, required=False)

    def validate_g(self, value):
        if not value > 0:
            raise serializers.ValidationError('Coupling strength must be positive.')
        return value

    def validate_delta(self, value):
        if not value > 0:
            raise serializers.ValidationError('Pointer width must be positive.')
        return value


PARAMETER_SERIALIZERS = {
    'compare_orderings': CompareOrderingsSerializer,
    'abl': ObservableRequestSerializer,
    'eor': ObservableRequestSerializer,
    'check_rules': CheckRulesSerializer,
    'weak_value': WeakValueSerializer,
    'weak_mc': WeakMcSerializer,
}


class AnalysisSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=ANALYSIS_KINDS)

    def to_internal_value(self, data):
        attrs = super().to_internal_value(data)
        parameters = {key: value for key, value in data.items() if key != 'kind'}
        serializer = PARAMETER_SERIALIZERS[attrs['kind']](data=parameters)
        if not serializer.is_valid():
            raise serializers.ValidationError(serializer.errors)
        return {'kind': attrs['kind'], 'parameters': dict(serializer.validated_data)}


# -------------------------
# Scenario document
# -------------------------
class ScenarioSerializer(serializers.Serializer):
    name = serializers.CharField()
    dims = serializers.ListField(child=serializers.IntegerField(min_value=2), allow_empty=False)
    basis_labels = serializers.ListField(child=serializers.ListField(child=serializers.CharField()), required=False)
    initial = AmplitudeListField(allow_empty=False)
    normalize = serializers.BooleanField(default=False)
    post = AmplitudeListField(required=False)
    states = serializers.DictField(child=AmplitudeListField(), required=False)
    events = EventSerializer(many=True)
    analyses = AnalysisSerializer(many=True, required=False)

    # Shapes only; physics (normalization, projector algebra) is checked on the built scenario.
    def validate(self, attrs):
        dims = attrs['dims']
        total = prod(dims)
        errors = {}

        def expect_length(path, values):
            if len(values) != total:
                errors[path] = [f"Expected {total} amplitudes for dims {dims}, got {len(values)}."]

        expect_length('initial', attrs['initial'])
        if 'post' in attrs:
            expect_length('post', attrs['post'])
        for key, values in attrs.get('states', {}).items():
            expect_length(f"states.{key}", values)

        labels = attrs.get('basis_labels')
        if labels is not None:
            if len(labels) != len(dims):
                errors['basis_labels'] = [f"Expected one label list per subsystem ({len(dims)})."]
            for position, (names, dim) in enumerate(zip(labels, dims)):
                if len(names) != dim:
                    errors[f"basis_labels[{position}]"] = [f"Expected {dim} labels, got {len(names)}."]

        for index, event in enumerate(attrs['events']):
            path = f"events[{index}]"
            target = event.get('target')
            if target is not None and target >= len(dims):
                errors[f"{path}.target"] = [f"Subsystem {target} does not exist; dims are {dims}."]
                continue
            observable = event['observable']
            if 'keyword' in observable:
                if dims[target] != 2:
                    errors[f"{path}.observable"] = [f"{observable['keyword']} needs a qubit target."]
                continue
            size = dims[target] if target is not None else total
            for position in observable.get('targets', []):
                if position >= len(dims):
                    errors[f"{path}.observable.targets"] = [f"Subsystem {position} does not exist."]
            for number, branch in enumerate(observable['branches']):
                matrix = branch['projector']
                if len(matrix) != size or any(len(row) != size for row in matrix):
                    errors[f"{path}.observable.branches[{number}].projector"] = [
                        f"Expected a {size}x{size} matrix."]
        if errors:
            raise serializers.ValidationError(errors)
        return attrs


def flatten_errors(detail, path=''):
    """Turn DRF's nested error structure into 'path: message' strings."""
    if isinstance(detail, dict):
        messages = []
        for key, value in detail.items():
            if key == 'non_field_errors':
                child = path
            elif isinstance(key, int) or (isinstance(key, str) and key.isdigit()):
                child = f"{path}[{key}]"
            else:
                child = f"{path}.{key}" if path else str(key)
            messages += flatten_errors(value, child)
        return messages
    if isinstance(detail, list):
        messages = []
        for index, item in enumerate(detail):
            if isinstance(item, str):
                messages.append(f"{path or '$'}: {item}")
            elif item:
                messages += flatten_errors(item, f"{path}[{index}]")
        return messages
    return [f"{path or '$'}: {detail}"]
