#include "hbml/error.hpp"
