#pragma once

#include "corefeval/align.hpp"
#include "corefeval/analysis.hpp"
#include "corefeval/assignment.hpp"
#include "corefeval/conllu.hpp"
#include "corefeval/entity_markup.hpp"
#include "corefeval/errors.hpp"
#include "corefeval/head.hpp"
#include "corefeval/io.hpp"
#include "corefeval/leaderboard.hpp"
#include "corefeval/metrics.hpp"
#include "corefeval/model.hpp"
#include "corefeval/perturb.hpp"
#include "corefeval/report.hpp"
#include "corefeval/score.hpp"
