#pragma once

#include "parser.hpp"

// Umbrella header: terms, substitutions, elaboration, unification, the
// resolution engine and its lemma library, the bottom-up semantics, the
// cut-free sequent prover, the proof translations, and the concrete syntax.
