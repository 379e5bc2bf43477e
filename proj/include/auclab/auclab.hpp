#pragma once

#include "auclab/accuracy.hpp"
#include "auclab/boosting.hpp"
#include "auclab/consistency.hpp"
#include "auclab/distribution.hpp"
#include "auclab/loss.hpp"
#include "auclab/optimizer.hpp"
#include "auclab/regret.hpp"
#include "auclab/risk.hpp"
#include "auclab/trials.hpp"
