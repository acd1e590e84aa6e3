#pragma once

#include "gazeforage/entropy.hpp"
#include "gazeforage/errors.hpp"
#include "gazeforage/format.hpp"
#include "gazeforage/heatmap.hpp"
#include "gazeforage/heatmap_io.hpp"
#include "gazeforage/image_io.hpp"
#include "gazeforage/ingest.hpp"
#include "gazeforage/log.hpp"
#include "gazeforage/powerlaw.hpp"
#include "gazeforage/report.hpp"
#include "gazeforage/rng.hpp"
#include "gazeforage/stats.hpp"
#include "gazeforage/svg.hpp"
#include "gazeforage/synth.hpp"
#include "gazeforage/types.hpp"
