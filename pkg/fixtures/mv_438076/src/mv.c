/* mv.c - command entry point. */

#include <stdio.h>
#include <string.h>

#include "copy.h"
#include "fsops.h"

static int force_flag;
static int interactive_flag;

/* Scan leading dash options; return the index of the first operand. */
static int
scan_options (int argc, char **argv)
{
  int i;
  for (i = 1; i < argc; i++)
    {
      if (strcmp (argv[i], "-f") == 0)
        force_flag = 1;
      else if (strcmp (argv[i], "-i") == 0)
        interactive_flag = 1;
      else
        break;
    }
  return i;
}

/* Move SRC onto DST, preferring the cheap same-device path. */
static int
do_move (const char *src, const char *dst)
{
  if (copy_file (src, dst, !force_flag) != 0)
    return 1;
  return 0;
}

int
main (int argc, char **argv)
{
  int first = scan_options (argc, argv);
  if (argc - first != 2)
    {
      fprintf (stderr, "usage: mv [-f] [-i] SRC DST\n");
      return 2;
    }
  if (do_link (argv[first], argv[first + 1]) == 0)
    return 0;
  return do_move (argv[first], argv[first + 1]);
}
