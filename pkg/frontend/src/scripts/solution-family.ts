import { runFigureCli } from "../cli.js";

process.exit(runFigureCli("solution-family", process.argv.slice(2)));
