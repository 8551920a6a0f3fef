"""quasikit: finite and free quasigroups.

* :mod:`quasikit.tables` - validated Cayley tables, isotopes, group analysis
* :mod:`quasikit.terms` - term language and exhaustive identity checking
* :mod:`quasikit.constructions` - linear quasigroups over small groups
* :mod:`quasikit.classify` - identity catalog, quasicommutators, isotopy oracle
* :mod:`quasikit.freewords` - word problem in free T- and medial quasigroups
"""
from .classify import (
    ClassificationReport,
    ClassifyOptions,
    catalog,
    catalog_entry,
    classify,
    decompose_T,
    derive_identity,
    engel_identity,
    nilpotency_identity,
    oracle_isotopy,
    quasicommutator,
)
from .constructions import (
    Form,
    LinearSpec,
    ch_quasigroup,
    enumerate_automorphisms,
    left_distributive_quasigroup,
    linear_quasigroup,
    resolve_group,
    t_quasigroup,
)
from .freewords import CanonicalWord, Mode, normal_form, words_equal
from .tables import (
    Permutation,
    QuasigroupTable,
    analyze_group,
    enumerate_latin_squares,
    load_qg,
    principal_isotope,
    random_latin_square,
    read_qg,
    save_qg,
    validate_table,
    write_qg,
)
from .terms import Identity, check_identity, parse_identity, parse_term

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
