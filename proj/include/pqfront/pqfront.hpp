#pragma once

#include "pqfront/bounds.hpp"
#include "pqfront/diffusion_operator.hpp"
#include "pqfront/pdesim.hpp"
#include "pqfront/profile.hpp"
#include "pqfront/reaction.hpp"
#include "pqfront/shooting.hpp"
