#pragma once

#include "twinbeam/beam_splitter.hpp"
#include "twinbeam/classical.hpp"
#include "twinbeam/detection.hpp"
#include "twinbeam/distribution.hpp"
#include "twinbeam/errors.hpp"
#include "twinbeam/filter.hpp"
#include "twinbeam/fock_oracle.hpp"
#include "twinbeam/log_arith.hpp"
#include "twinbeam/multimode.hpp"
#include "twinbeam/rng.hpp"
#include "twinbeam/twin_beam.hpp"
