#ifndef MECHFORGE_MECHFORGE_HPP_
#define MECHFORGE_MECHFORGE_HPP_

#include "mechforge/canonical.hpp"
#include "mechforge/direct.hpp"
#include "mechforge/environment.hpp"
#include "mechforge/game.hpp"
#include "mechforge/monotonicity.hpp"
#include "mechforge/mutation.hpp"
#include "mechforge/robustness.hpp"
#include "mechforge/scc.hpp"
#include "mechforge/scheme.hpp"
#include "mechforge/small_transfer.hpp"
#include "mechforge/verify.hpp"

#endif  // MECHFORGE_MECHFORGE_HPP_
