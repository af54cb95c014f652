def handler(event, context):
    return {"step": "verification", "input": event}
