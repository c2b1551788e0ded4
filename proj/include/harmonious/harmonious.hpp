#ifndef HARMONIOUS_HARMONIOUS_HPP
#define HARMONIOUS_HARMONIOUS_HPP

#include "backtracking.hpp"
#include "certificate.hpp"
#include "hybrid.hpp"
#include "labelling.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "sweep.hpp"
#include "tabu.hpp"
#include "tree.hpp"
#include "tree_enum.hpp"
#include "twostage.hpp"

#endif  // HARMONIOUS_HARMONIOUS_HPP
