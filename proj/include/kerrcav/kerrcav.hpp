#pragma once

#include "kerrcav/errors.hpp"
#include "kerrcav/model.hpp"
#include "kerrcav/oracle.hpp"
#include "kerrcav/joint_state.hpp"
#include "kerrcav/entanglement.hpp"
#include "kerrcav/husimi.hpp"
#include "kerrcav/audit.hpp"
#include "kerrcav/sampling.hpp"
#include "kerrcav/parallel.hpp"
