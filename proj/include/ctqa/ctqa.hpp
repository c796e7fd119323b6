#pragma once

// Convenience include for the whole library. The individual headers form a
// strict layer cake (each includes the ones below it), so pulling in any
// single layer also works:
//
//   rational      exact nonnegative arithmetic for durations and thresholds
//   linalg        dense complex matrices, Hermitian eigendecomposition
//   scheduler     decider + writer pairs producing per-symbol durations
//   machine       the automaton shapes and their evolution loops
//   constructions named machines, composition operators, the zoo
//   recognition   verdict policies, word families, sweeps, oracle checks
//   machine_file  the text format and its serializer

#include "ctqa/machine_file.hpp"
#include "ctqa/recognition.hpp"
