def handler(event, context):
    return {"step": "tuning", "input": event}
