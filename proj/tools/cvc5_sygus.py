#!/usr/bin/env python3
"""Run a SyGuS-IF v2 file through the cvc5 Python bindings.

Prints the solver's answers the way the cvc5 binary would, so it can stand in
for `cvc5 --lang=sygus2 FILE` where only the Python package is installed.
"""
import sys

import cvc5


def main() -> int:
    if len(sys.argv) != 2:
        print("usage: cvc5_sygus.py FILE", file=sys.stderr)
        return 2
    tm = cvc5.TermManager()
    solver = cvc5.Solver(tm)
    solver.setOption("sygus", "true")
    solver.setOption("produce-models", "true")
    parser = cvc5.InputParser(solver)
    parser.setFileInput(cvc5.InputLanguage.SYGUS_2_1, sys.argv[1])
    symbols = parser.getSymbolManager()
    while True:
        cmd = parser.nextCommand()
        if cmd.isNull():
            break
        out = cmd.invoke(solver, symbols)
        if out:
            print(out, end="" if out.endswith("\n") else "\n", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
