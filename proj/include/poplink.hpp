#pragma once

#include "poplink/blocking.hpp"
#include "poplink/certificate_graph.hpp"
#include "poplink/comparators.hpp"
#include "poplink/config.hpp"
#include "poplink/constraints.hpp"
#include "poplink/core_model.hpp"
#include "poplink/errors.hpp"
#include "poplink/evaluation.hpp"
#include "poplink/fusion.hpp"
#include "poplink/group.hpp"
#include "poplink/ingest.hpp"
#include "poplink/io.hpp"
#include "poplink/match_set.hpp"
#include "poplink/pairwise.hpp"
#include "poplink/parallel.hpp"
#include "poplink/phonetic.hpp"
#include "poplink/pipeline.hpp"
#include "poplink/record_store.hpp"
#include "poplink/relational.hpp"
#include "poplink/synthgen.hpp"
#include "poplink/text.hpp"
