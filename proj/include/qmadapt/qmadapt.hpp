#pragma once

#include "qmadapt/audit.hpp"
#include "qmadapt/engine.hpp"
#include "qmadapt/goal.hpp"
#include "qmadapt/model.hpp"
#include "qmadapt/model_json.hpp"
#include "qmadapt/store.hpp"
#include "qmadapt/tailor.hpp"
#include "qmadapt/validate.hpp"
