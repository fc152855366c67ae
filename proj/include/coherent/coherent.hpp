#ifndef COHERENT_COHERENT_HPP
#define COHERENT_COHERENT_HPP

#include "coherent/scalar.hpp"
#include "coherent/market.hpp"
#include "coherent/order.hpp"
#include "coherent/simplex.hpp"
#include "coherent/superhedge.hpp"
#include "coherent/option_chain.hpp"
#include "coherent/black_scholes.hpp"
#include "coherent/io.hpp"
#include "coherent/random_market.hpp"
#include "coherent/report.hpp"

#endif  // COHERENT_COHERENT_HPP
