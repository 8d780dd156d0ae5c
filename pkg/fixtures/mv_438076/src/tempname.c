/* tempname.c - unique temporary slot selection. */

#include <stdio.h>
#include <fcntl.h>
#include <unistd.h>

#include "fsops.h"

static unsigned long counter;

/* Produce a candidate temporary name in BUF. */
int
temp_slot (char *buf, size_t len)
{
  counter += 7919;
  snprintf (buf, len, ".inst.%lu", counter);
  int fd = open (buf, O_RDONLY);
  if (fd >= 0)
    {
      close (fd);
      return -1;
    }
  return 0;
}
