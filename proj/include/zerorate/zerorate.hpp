#pragma once

// Zero-rate reliability quantities for discrete memoryless channels with
// list decoding: exact small-blocklength ML list-decoding error
// probabilities, the exponents D_m / D_min / E_L(0+), Ramsey-theoretic
// monochromatic subcode extraction with its deviation bound, and the
// sample-space-duplicating halving procedure.
//
// All exponents and divergences are in nats.

#include "zerorate/channel.hpp"
#include "zerorate/code.hpp"
#include "zerorate/common.hpp"
#include "zerorate/decoder.hpp"
#include "zerorate/exponent.hpp"
#include "zerorate/halving.hpp"
#include "zerorate/instances.hpp"
#include "zerorate/io.hpp"
#include "zerorate/ramsey.hpp"
#include "zerorate/simplex_opt.hpp"
