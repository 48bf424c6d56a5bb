#pragma once

// Umbrella header for the whole allocation engine.

#include "skillgraph/assoc_miner.hpp"
#include "skillgraph/cascade.hpp"
#include "skillgraph/concept_kb.hpp"
#include "skillgraph/concept_miner.hpp"
#include "skillgraph/config.hpp"
#include "skillgraph/dataset.hpp"
#include "skillgraph/embeddings.hpp"
#include "skillgraph/errors.hpp"
#include "skillgraph/eval.hpp"
#include "skillgraph/external_linker.hpp"
#include "skillgraph/kgraph.hpp"
#include "skillgraph/ner.hpp"
#include "skillgraph/porter.hpp"
#include "skillgraph/text.hpp"
#include "skillgraph/types.hpp"
