#pragma once

#include "geofence/config.hpp"
#include "geofence/crs.hpp"
#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/geo_types.hpp"
#include "geofence/json_wire.hpp"
#include "geofence/osm_xml.hpp"
#include "geofence/outputs.hpp"
#include "geofence/raster.hpp"
#include "geofence/rtree.hpp"
#include "geofence/session.hpp"
#include "geofence/spatial_store.hpp"
#include "geofence/wkt.hpp"
