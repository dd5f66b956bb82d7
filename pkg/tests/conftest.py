import pytest

from causal_account import Scm, builtin_pattern, models


def _model_fixture(name: str):
    @pytest.fixture(scope="session", name=name)
    def fixture() -> Scm:
        return models.load_model(name)

    return fixture


titus = _model_fixture("titus")
uber = _model_fixture("uber")
uav_weather = _model_fixture("uav_weather")
uav_attacker = _model_fixture("uav_attacker")
uav_attacker_ids = _model_fixture("uav_attacker_ids")
bad_weather_raci = _model_fixture("bad_weather_raci")


@pytest.fixture(scope="session")
def lindberg():
    return builtin_pattern("lindberg")


@pytest.fixture(scope="session")
def raci():
    return builtin_pattern("raci")
