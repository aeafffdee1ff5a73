#pragma once

#define ENTANGLE_VERSION "0.1.0"

#include "entangle/errors.hpp"
#include "entangle/geometric.hpp"
#include "entangle/io.hpp"
#include "entangle/linalg.hpp"
#include "entangle/partovi.hpp"
#include "entangle/report.hpp"
#include "entangle/schmidt.hpp"
#include "entangle/tensor_state.hpp"
#include "entangle/verify.hpp"
