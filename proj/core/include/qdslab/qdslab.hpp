#pragma once

#include "qdslab/catalog.hpp"
#include "qdslab/deficiency.hpp"
#include "qdslab/extension.hpp"
#include "qdslab/linalg.hpp"
#include "qdslab/lyapunov.hpp"
#include "qdslab/model.hpp"
#include "qdslab/operator_core.hpp"
#include "qdslab/quadrature.hpp"
#include "qdslab/resolvent.hpp"
#include "qdslab/semigroup.hpp"
#include "qdslab/sweep.hpp"
#include "qdslab/tau_f.hpp"
#include "qdslab/types.hpp"
#include "qdslab/version.hpp"
