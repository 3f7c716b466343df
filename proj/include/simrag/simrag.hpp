#pragma once

#include "simrag/baselines.hpp"
#include "simrag/config.hpp"
#include "simrag/csv.hpp"
#include "simrag/double_double.hpp"
#include "simrag/dataset.hpp"
#include "simrag/error.hpp"
#include "simrag/http_provider.hpp"
#include "simrag/llm_client.hpp"
#include "simrag/parser.hpp"
#include "simrag/prompt.hpp"
#include "simrag/rate_limiter.hpp"
#include "simrag/report.hpp"
#include "simrag/stats.hpp"
#include "simrag/svg.hpp"
#include "simrag/sweep.hpp"
