#pragma once

#include "dessec/errors.hpp"
#include "dessec/events.hpp"
#include "dessec/automaton.hpp"
#include "dessec/algorithms.hpp"
#include "dessec/attack.hpp"
#include "dessec/diagnosis.hpp"
#include "dessec/runtime.hpp"
#include "dessec/safety.hpp"
#include "dessec/synthesis.hpp"
#include "dessec/model_io.hpp"
#include "dessec/report.hpp"
