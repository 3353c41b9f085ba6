#pragma once

#include "idkit/bayes.hpp"
#include "idkit/bit_source.hpp"
#include "idkit/bitstring.hpp"
#include "idkit/errors.hpp"
#include "idkit/identification.hpp"
#include "idkit/info_measures.hpp"
#include "idkit/process_io.hpp"
#include "idkit/process_spec.hpp"
#include "idkit/rational.hpp"
#include "idkit/sample_complexity.hpp"
#include "idkit/sampling.hpp"
#include "idkit/sc_distributions.hpp"
#include "idkit/sequence_measures.hpp"
#include "idkit/typical_sets.hpp"
