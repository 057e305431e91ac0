#ifndef PFAFF_PFAFF_HPP
#define PFAFF_PFAFF_HPP

#include "pfaff/core.hpp"
#include "pfaff/diagnostics.hpp"
#include "pfaff/errors.hpp"
#include "pfaff/integrate.hpp"
#include "pfaff/linalg.hpp"
#include "pfaff/reaction.hpp"
#include "pfaff/reservoir.hpp"
#include "pfaff/skew.hpp"
#include "pfaff/zoo.hpp"

#endif
