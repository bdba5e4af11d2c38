#pragma once

// Umbrella header for the toolkit.

#include "ecbs/codec.hpp"
#include "ecbs/costmodel.hpp"
#include "ecbs/curve.hpp"
#include "ecbs/errors.hpp"
#include "ecbs/field.hpp"
#include "ecbs/opcount.hpp"
#include "ecbs/protocol.hpp"
#include "ecbs/random.hpp"
#include "ecbs/registry.hpp"
