#ifndef QUADHAM_QUADHAM_HPP
#define QUADHAM_QUADHAM_HPP

#include "algebra.hpp"
#include "disentangle.hpp"
#include "errors.hpp"
#include "fock.hpp"
#include "models.hpp"
#include "rational.hpp"
#include "smallmat.hpp"
#include "transition.hpp"
#include "types.hpp"
#include "validation.hpp"

#endif  // QUADHAM_QUADHAM_HPP
