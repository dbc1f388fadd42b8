#pragma once

#include "colearn/config.hpp"
#include "colearn/constraint_io.hpp"
#include "colearn/error.hpp"
#include "colearn/experiment.hpp"
#include "colearn/hard_constraints.hpp"
#include "colearn/learning_engine.hpp"
#include "colearn/oracle.hpp"
#include "colearn/plan_io.hpp"
#include "colearn/plan_model.hpp"
#include "colearn/results_io.hpp"
#include "colearn/scenario.hpp"
#include "colearn/text.hpp"
#include "colearn/tree_overlay.hpp"
