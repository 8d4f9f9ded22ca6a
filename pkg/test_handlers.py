import argparse

import pytest

from handlers import (EXIT_OK, EXIT_USAGE, BaseCommand, DomainError, MimError, UsageError,
                      ValidationError, parse_grid)

class _Command(BaseCommand):
    def __init__(self, error=None):
        super().__init__("probe")
        self.error = error

    def execute(self, args):
        if self.error:
            raise self.error
        return EXIT_OK

def test_parse_grid_inclusive_endpoints():
    assert parse_grid("0:1:0.25") == [0.0, 0.25, 0.5, 0.75, 1.0]
    assert parse_grid("0.1:0.3:0.1") == [0.1, 0.2, 0.3]
    assert parse_grid("0.5") == [0.5]

def test_parse_grid_snaps_last_point():
    grid = parse_grid("0:0.3:0.1")
    assert len(grid) == 4
    assert grid[-1] == 0.3

@pytest.mark.parametrize("spec", ["a:b:c", "0:1", "0:1:0", "1:0:0.1", "0:1:-0.1"])
def test_parse_grid_rejects_bad_specs(spec):
    with pytest.raises(UsageError):
        parse_grid(spec)

def test_error_hierarchy():
    assert issubclass(ValidationError, MimError)
    assert issubclass(DomainError, MimError)
    e = DomainError("intern", "für Nutzer")
    assert e.user_message == "für Nutzer"
    assert DomainError("nur intern").user_message == "nur intern"

def test_handle_maps_errors_to_exit_codes(capsys):
    args = argparse.Namespace()
    assert _Command().handle(args) == EXIT_OK
    assert _Command(DomainError("x", "schlecht")).handle(args) == EXIT_USAGE
    assert "Fehler: schlecht" in capsys.readouterr().err
    assert _Command(RuntimeError("boom")).handle(args) == EXIT_USAGE
    assert "unerwarteter Fehler" in capsys.readouterr().err
