#pragma once

#define EQUINET_VERSION "0.1.0"
