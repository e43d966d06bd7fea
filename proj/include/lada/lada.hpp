#pragma once

#include "lada/adapter.hpp"
#include "lada/benchmark.hpp"
#include "lada/checkpoint.hpp"
#include "lada/common.hpp"
#include "lada/embedding_store.hpp"
#include "lada/inference.hpp"
#include "lada/metrics.hpp"
#include "lada/prototypes.hpp"
#include "lada/run_config.hpp"
#include "lada/stats.hpp"
#include "lada/text_head.hpp"
#include "lada/trainer.hpp"
