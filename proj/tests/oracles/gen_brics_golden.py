#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Writes tests/data/brics_golden.tsv from RDKit for the drug fixture.

Bonds and labels come from FindBRICSBonds (first matching rule wins);
fragments from BreakBRICSBonds on those bonds followed by GetMolFrags, deduplicated in
order of their lowest atom index, stereo removed. Run offline only.
"""
import pathlib
import sys

from rdkit import Chem
from rdkit.Chem import BRICS

here = pathlib.Path(__file__).resolve().parent
data = here.parent / "data"


def fragments(smiles):
    mol = Chem.MolFromSmiles(smiles)
    Chem.RemoveStereochemistry(mol)
    broken = BRICS.BreakBRICSBonds(mol, list(BRICS.FindBRICSBonds(mol)))
    out = []
    for frag in Chem.GetMolFrags(broken, asMols=True, sanitizeFrags=True):
        text = Chem.MolToSmiles(frag)
        if text not in out:
            out.append(text)
    return out


def main():
    rows = (data / "drugs.tsv").read_text().strip().split("\n")[1:]
    lines = ["drug_id\tfragments"]
    for row in rows:
        name, smiles = row.split("\t")
        lines.append(name + "\t" + " ".join(fragments(smiles)))
    (data / "brics_golden.tsv").write_text("\n".join(lines) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
