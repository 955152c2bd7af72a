#pragma once

#define MSHJB_VERSION_MAJOR 0
#define MSHJB_VERSION_MINOR 1
#define MSHJB_VERSION_PATCH 0
#define MSHJB_VERSION "0.1.0"
