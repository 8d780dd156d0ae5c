/* backup.c - backup slot labels and rotation. */

#include <stdio.h>
#include <string.h>
#include <sys/stat.h>

#include "fsops.h"

/* Build the simple backup label: "<base>~". */
int
make_backup_name (char *buf, size_t len, const char *base)
{
  if (strlen (base) + 2 > len)
    return -1;
  snprintf (buf, len, "%s~", base);
  return 0;
}

/* Pick the first free numbered slot. */
int
numbered_slot (char *buf, size_t len, const char *base)
{
  struct stat st;
  int i;
  for (i = 1; i < 1000; i++)
    {
      snprintf (buf, len, "%s.~%d~", base, i);
      if (stat (buf, &st) != 0)
        return i;
    }
  return -1;
}
