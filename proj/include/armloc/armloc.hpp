#pragma once

#include "armloc/associate.hpp"
#include "armloc/augment.hpp"
#include "armloc/core.hpp"
#include "armloc/eval.hpp"
#include "armloc/extract.hpp"
#include "armloc/image.hpp"
#include "armloc/io.hpp"
#include "armloc/labelgen.hpp"
#include "armloc/synth.hpp"
