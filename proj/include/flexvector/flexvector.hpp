#pragma once

// Umbrella header: the whole library in one include.

#include "flexvector/types.hpp"
#include "flexvector/csr.hpp"
#include "flexvector/io.hpp"
#include "flexvector/reference.hpp"
#include "flexvector/generate.hpp"
#include "flexvector/partition.hpp"
#include "flexvector/tiles.hpp"
#include "flexvector/vertex_cut.hpp"
#include "flexvector/topk.hpp"
#include "flexvector/config.hpp"
#include "flexvector/isa.hpp"
#include "flexvector/compiler.hpp"
#include "flexvector/metrics.hpp"
#include "flexvector/machine.hpp"
#include "flexvector/grow.hpp"
#include "flexvector/pipeline.hpp"
#include "flexvector/sweep.hpp"
#include "flexvector/experiment.hpp"
