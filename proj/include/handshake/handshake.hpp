// Umbrella header.
#pragma once

#include "handshake/bench.hpp"
#include "handshake/codec.hpp"
#include "handshake/core.hpp"
#include "handshake/data.hpp"
#include "handshake/decoder.hpp"
#include "handshake/eval.hpp"
#include "handshake/index_map.hpp"
#include "handshake/model/checkpoint.hpp"
#include "handshake/model/gradient_check.hpp"
#include "handshake/model/infer.hpp"
#include "handshake/model/network.hpp"
#include "handshake/model/optimizer.hpp"
#include "handshake/model/params.hpp"
#include "handshake/model/train.hpp"
#include "handshake/tagging_io.hpp"
