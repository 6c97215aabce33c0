#!/usr/bin/env python3
"""
Every name a checker module imports is used in that module
"""

import ast
import re
from pathlib import Path

import pytest

ROOT = Path(__file__).parent.parent
MODULES = sorted(path.name for path in ROOT.glob("*.py"))


def _unused_imports(path: Path):
    tree = ast.parse(path.read_text(encoding="utf-8"))
    imported = {}
    for node in tree.body:
        if isinstance(node, ast.Import):
            for alias in node.names:
                imported[(alias.asname or alias.name).split(".")[0]] = node.lineno
        elif isinstance(node, ast.ImportFrom):
            for alias in node.names:
                imported[alias.asname or alias.name] = node.lineno
        elif isinstance(node, ast.Try):
            for inner in node.body:
                if isinstance(inner, ast.ImportFrom):
                    for alias in inner.names:
                        imported[alias.asname or alias.name] = inner.lineno
    used = {node.id for node in ast.walk(tree) if isinstance(node, ast.Name)}
    # string annotations such as "weakref.WeakValueDictionary"
    for node in ast.walk(tree):
        if isinstance(node, ast.Constant) and isinstance(node.value, str):
            used.update(re.findall(r"[A-Za-z_]\w*", node.value))
    return sorted(name for name in imported if name not in used)


@pytest.mark.unit
class TestModuleImports:
    """Unused imports in the top-level modules"""

    def test_modules_found(self):
        assert "belief_semantics.py" in MODULES
        assert "qbf_translation.py" in MODULES

    @pytest.mark.parametrize("module", MODULES)
    def test_no_unused_imports(self, module):
        assert _unused_imports(ROOT / module) == []
