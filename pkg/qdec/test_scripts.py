#!/usr/bin/env python3
import runpy

import pytest

# Module demos, in dependency order
DEMO_MODULES = [
    "tensor_core",
    "randomness",
    "channels",
    "entropies",
    "decoupling",
    "coding",
    "locking",
    "experiments",
]


def run_all_tests():
    for module in DEMO_MODULES:
        print(f"\n=== Running {module} Tests ===")
        try:
            runpy.run_module(f"qdec.{module}", run_name="__main__")
        except Exception as e:
            print(f"Error running {module}: {str(e)}")


@pytest.mark.slow
@pytest.mark.parametrize("module", DEMO_MODULES)
def test_module_demo_runs_cleanly(module, capsys):
    runpy.run_module(f"qdec.{module}", run_name="__main__")
    output = capsys.readouterr().out
    assert "Running test cases" in output
    assert "Error:" not in output
    assert "An unexpected error occurred" not in output


if __name__ == "__main__":
    print("Starting all module demos...")
    run_all_tests()
    print("\nAll demos completed!")
