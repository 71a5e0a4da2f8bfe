import pytest

from eqsolv import derive_loop, fixture, with_loop

MALCEV = 'plus(plus(x1, neg(x2)), x3)'

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section('acceptance criteria')
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)


@pytest.fixture(scope='session')
def z4():
    return fixture('z4')


@pytest.fixture(scope='session')
def z9():
    return fixture('z9_f2')


@pytest.fixture(scope='session')
def a3():
    return fixture('a3')


@pytest.fixture(scope='session')
def d8():
    return fixture('d8')


@pytest.fixture(scope='session')
def z4_loop(z4):
    return derive_loop(z4, MALCEV)


@pytest.fixture(scope='session')
def z9_loop(z9):
    return derive_loop(z9, MALCEV)


@pytest.fixture(scope='session')
def z4l(z4, z4_loop):
    return with_loop(z4, z4_loop)


@pytest.fixture(scope='session')
def z9l(z9, z9_loop):
    return with_loop(z9, z9_loop)


@pytest.fixture(scope='session')
def a3l(a3):
    return with_loop(a3, derive_loop(a3, MALCEV, check_nilpotent=False))
