#pragma once

#define ROADHAWK_VERSION_MAJOR 0
#define ROADHAWK_VERSION_MINOR 1
#define ROADHAWK_VERSION_PATCH 0
#define ROADHAWK_VERSION "0.1.0"
