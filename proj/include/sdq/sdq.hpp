#pragma once

#include "sdq/classical.hpp"
#include "sdq/errors.hpp"
#include "sdq/io.hpp"
#include "sdq/reparam.hpp"
#include "sdq/spectrum.hpp"
#include "sdq/tridiag.hpp"
#include "sdq/tunnelling.hpp"
